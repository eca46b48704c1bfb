// tests/test_neuralnet.cpp

// Copyright 2026  Driftlab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "driftlab/channel.hpp"
#include "driftlab/gradcheck.hpp"
#include "driftlab/mlp.hpp"
#include "driftlab/rng.hpp"

using namespace driftlab;

TEST_CASE("forward pass: zero parameters give zero output") {
  MlpModel model;
  model.weights = {Eigen::MatrixXd::Zero(3, 4), Eigen::MatrixXd::Zero(2, 3)};
  model.biases = {Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)};
  Rng rng(1);
  const Embedding y = mlp_forward(model, gaussian_vector(rng, 4));
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward pass: single identity layer is the identity map") {
  const MlpModel model = MlpModel::identity(5);
  Rng rng(2);
  const Embedding x = gaussian_vector(rng, 5);
  CHECK((mlp_forward(model, x) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward pass matches a hand-computed 2-2-2 tanh chain") {
  MlpModel model;
  model.weights.resize(2);
  model.biases.resize(2);
  model.weights[0].resize(2, 2);
  model.weights[0] << 0.5, -0.25, 0.75, 1.0;
  model.biases[0] = Eigen::VectorXd(2);
  model.biases[0] << 0.1, -0.2;
  model.weights[1].resize(2, 2);
  model.weights[1] << 1.0, 2.0, -0.5, 0.25;
  model.biases[1] = Eigen::VectorXd(2);
  model.biases[1] << 0.05, 0.0;

  Embedding x(2);
  x << 1.0, 0.0;
  const Embedding y = mlp_forward(model, x);

  const double h0 = std::tanh(0.5 * 1.0 + (-0.25) * 0.0 + 0.1);
  const double h1 = std::tanh(0.75 * 1.0 + 1.0 * 0.0 + (-0.2));
  CHECK(y(0) == doctest::Approx(1.0 * h0 + 2.0 * h1 + 0.05).epsilon(1e-15));
  CHECK(y(1) == doctest::Approx(-0.5 * h0 + 0.25 * h1 + 0.0).epsilon(1e-15));
}

TEST_CASE("cosine loss at the target is zero with a gradient orthogonal to y") {
  Rng rng(3);
  const Embedding y = gaussian_vector(rng, 6);
  const LossGrad lg = cosine_loss_and_grad(y, y);
  CHECK(std::abs(lg.loss) < 1e-14);
  CHECK(std::abs(lg.d_output.dot(y) / y.norm()) < 1e-12);
}

TEST_CASE("cosine loss of orthogonal vectors is one") {
  Embedding y(2), t(2);
  y << 1.0, 0.0;
  t << 0.0, 2.5;
  CHECK(cosine_loss_and_grad(y, t).loss == doctest::Approx(1.0));
}

TEST_CASE("cosine loss gradient matches central finite differences") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd y = gaussian_vector(rng, 5);
    const Eigen::VectorXd target = gaussian_vector(rng, 5);
    const LossGrad analytic = cosine_loss_and_grad(y, target);
    const Eigen::VectorXd numeric = finite_diff_gradient(
        [&target](const Eigen::VectorXd& v) { return cosine_loss_and_grad(v, target).loss; }, y);
    CHECK(max_relative_error(analytic.d_output, numeric) < 1e-5);
  }
}

TEST_CASE("cosine loss is scale-invariant in y") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd y = gaussian_vector(rng, 7);
    const Eigen::VectorXd t = gaussian_vector(rng, 7);
    const double c = 0.01 + 10.0 * rng.next_unit();
    CHECK(std::abs(cosine_loss_and_grad((c * y).eval(), t).loss -
                   cosine_loss_and_grad(y, t).loss) < 1e-12);
  }
}

TEST_CASE("aam loss reproduces the two-class hand computation") {
  // margin 0, scale 1, orthonormal class weights, embedding on the true
  // class: logits (1, 0), loss = ln(1 + exp(-1))
  AamHead head;
  head.margin = 0.0;
  head.scale = 1.0;
  head.class_weights = Eigen::MatrixXd::Identity(2, 2);
  Embedding e(2);
  e << 1.0, 0.0;
  const AamLossGrad lg = aam_loss_and_grad(e, head, 0);
  CHECK(lg.loss == doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("zero margin reduces to plain normalized softmax cross-entropy") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    AamHead head = AamHead::random(6, 4, rng.next_u64());
    head.margin = 0.0;
    head.scale = 7.5;
    const Embedding e = gaussian_vector(rng, 6);
    const int label = static_cast<int>(rng.next_below(4));
    const double aam = aam_loss_and_grad(e, head, label).loss;

    // direct softmax cross-entropy over scaled cosines
    const Embedding e_hat = e / e.norm();
    Eigen::VectorXd logits(4);
    for (int j = 0; j < 4; ++j) {
      logits(j) = head.scale * e_hat.dot(head.class_weights.col(j));
    }
    const double max_logit = logits.maxCoeff();
    const double lse = max_logit + std::log((logits.array() - max_logit).exp().sum());
    CHECK(std::abs(aam - (lse - logits(label))) < 1e-12);
  }
}

TEST_CASE("aam gradients match central finite differences") {
  Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    AamHead head = AamHead::random(5, 3, rng.next_u64(), 0.2, 12.0);
    const Embedding e = gaussian_vector(rng, 5);
    const int label = static_cast<int>(rng.next_below(3));
    const AamLossGrad analytic = aam_loss_and_grad(e, head, label);

    const Eigen::VectorXd numeric = finite_diff_gradient(
        [&head, label](const Eigen::VectorXd& v) { return aam_loss_and_grad(v, head, label).loss; },
        e);
    CHECK(max_relative_error(analytic.d_embedding, numeric) < 1e-4);
  }
}

TEST_CASE("aam rejects out-of-range labels") {
  AamHead head = AamHead::random(4, 3, 1);
  Rng rng(2);
  const Embedding e = gaussian_vector(rng, 4);
  CHECK_THROWS_AS(aam_loss_and_grad(e, head, -1), DomainError);
  CHECK_THROWS_AS(aam_loss_and_grad(e, head, 3), DomainError);
}

TEST_CASE("prototype head init points at the class means") {
  std::vector<Eigen::VectorXd> embeddings;
  std::vector<int> labels;
  Embedding a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  embeddings = {a, a, b};
  labels = {0, 0, 1};
  const AamHead head = AamHead::from_prototypes(embeddings, labels, 2);
  CHECK((head.class_weights.col(0) - a).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((head.class_weights.col(1) - b).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("backprop single linear layer has the closed-form weight gradient") {
  MlpModel model;
  model.weights = {Eigen::MatrixXd::Zero(3, 4)};
  model.biases = {Eigen::VectorXd::Zero(3)};
  Rng rng(41);
  Eigen::MatrixXd w(3, 4);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) w(r, c) = rng.next_gaussian();
  }
  model.weights[0] = w;
  const Embedding x = gaussian_vector(rng, 4);
  const Eigen::VectorXd dloss_dy = gaussian_vector(rng, 3);
  const ForwardTrace trace = mlp_forward_trace(model, x);
  const MlpGradients grads = backprop(model, trace, dloss_dy);
  const Eigen::MatrixXd expected = dloss_dy * x.transpose();
  CHECK((grads.d_weights[0] - expected).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((grads.d_biases[0] - dloss_dy).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("full backprop matches central finite differences on 32-16-32") {
  const auto reports = run_gradient_suite(20, 1e-4);
  REQUIRE(reports.size() == 60);
  for (const auto& report : reports) {
    INFO(report.name, " max_rel_err ", report.max_rel_err);
    CHECK(report.pass);
  }
}

TEST_CASE("adam leaves parameters unchanged on zero gradients") {
  Eigen::MatrixXd param(2, 2);
  param << 1.0, -2.0, 3.0, 0.5;
  const Eigen::MatrixXd before = param;
  AdamTensorState state = AdamTensorState::zeros(2, 2);
  AdamHyper hyper;
  adam_step_tensor(param, Eigen::MatrixXd::Zero(2, 2), state, hyper, 1);
  CHECK((param - before).cwiseAbs().maxCoeff() == 0.0);
  // moments decay but stay zero here; a second zero step still changes nothing
  adam_step_tensor(param, Eigen::MatrixXd::Zero(2, 2), state, hyper, 2);
  CHECK((param - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("first adam step moves each coordinate by about lr") {
  Eigen::MatrixXd param = Eigen::MatrixXd::Zero(1, 3);
  Eigen::MatrixXd grad(1, 3);
  grad << 4.0, -0.25, 100.0;
  AdamTensorState state = AdamTensorState::zeros(1, 3);
  AdamHyper hyper;
  hyper.lr = 0.05;
  adam_step_tensor(param, grad, state, hyper, 1);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(param(0, c)) == doctest::Approx(hyper.lr).epsilon(1e-6));
    CHECK(param(0, c) * grad(0, c) < 0.0);  // moves against the gradient
  }
}

TEST_CASE("adam matches a hand-computed three-step trajectory on w^2") {
  // f(w) = w^2, g = 2w, w0 = 1, lr = 0.1, defaults beta1/beta2/eps
  const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double w_ref = 1.0, m = 0.0, v = 0.0;
  Eigen::MatrixXd w_impl(1, 1);
  w_impl(0, 0) = 1.0;
  AdamTensorState state = AdamTensorState::zeros(1, 1);
  AdamHyper hyper;
  hyper.lr = lr;

  for (int t = 1; t <= 3; ++t) {
    const double g = 2.0 * w_ref;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double m_hat = m / (1.0 - std::pow(b1, t));
    const double v_hat = v / (1.0 - std::pow(b2, t));
    w_ref -= lr * m_hat / (std::sqrt(v_hat) + eps);

    Eigen::MatrixXd grad(1, 1);
    grad(0, 0) = 2.0 * w_impl(0, 0);
    adam_step_tensor(w_impl, grad, state, hyper, t);
    CHECK(w_impl(0, 0) == doctest::Approx(w_ref).epsilon(1e-15));
  }
  // ballpark sanity on the final value: three near-lr steps downhill from 1
  CHECK(w_ref < 1.0 - 2.5 * lr);
  CHECK(w_ref > 1.0 - 3.5 * lr);
}

namespace {

Dataset linear_map_dataset(int n, int dim, std::uint64_t seed) {
  ChannelSpec spec;
  spec.kind = ChannelKind::orthogonal;
  spec.noise_sigma = 0.0;
  spec.seed = seed;
  const ChannelModel ch = make_channel(spec, dim);
  Dataset data;
  Rng rng(derive_seed(seed, "dataset"));
  for (int i = 0; i < n; ++i) {
    const Embedding x = unit_sphere_vector(rng, dim);
    data.inputs.push_back(x);
    data.targets.push_back(ch.rotation * x);
  }
  return data;
}

}  // namespace

TEST_CASE("training recovers a fixed random orthogonal map with a linear layer") {
  const int dim = 16;
  const Dataset data = linear_map_dataset(2000, dim, 91);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 8;
  cfg.validate_every = 200;
  cfg.adam.lr = 1e-2;  // sanity task, not the paper's fine-tuning rate
  cfg.shuffle_seed = 5;
  const TrainResult result = train(MlpModel::random({dim, dim}, 17), data, LossKind::cosine, cfg);
  CHECK(result.history.back().val_loss < 0.01);
  CHECK(result.best_val_loss < 0.01);
}

TEST_CASE("a validation interval beyond the horizon yields exactly one final validation") {
  const Dataset data = linear_map_dataset(100, 6, 13);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 10;
  cfg.validate_every = 10000;
  cfg.shuffle_seed = 3;
  const TrainResult result = train(MlpModel::random({6, 6}, 2), data, LossKind::cosine, cfg);
  REQUIRE(result.history.size() == 1);
  CHECK(result.history.back().val_loss == result.best_val_loss);
  CHECK(result.best_iteration == result.history.back().iteration);
}

TEST_CASE("training history is bitwise reproducible") {
  const Dataset data = linear_map_dataset(300, 8, 29);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  cfg.validate_every = 15;
  cfg.adam.lr = 1e-3;
  cfg.shuffle_seed = 44;
  const TrainResult a = train(MlpModel::random({8, 8}, 3), data, LossKind::cosine, cfg);
  const TrainResult b = train(MlpModel::random({8, 8}, 3), data, LossKind::cosine, cfg);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].iteration == b.history[i].iteration);
    CHECK(a.history[i].train_loss == b.history[i].train_loss);
    CHECK(a.history[i].val_loss == b.history[i].val_loss);
  }
  for (std::size_t l = 0; l < a.model.weights.size(); ++l) {
    CHECK((a.model.weights[l] - b.model.weights[l]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("zero epochs return the initial model after one validation") {
  const Dataset data = linear_map_dataset(50, 5, 7);
  TrainConfig cfg;
  cfg.epochs = 0;
  cfg.batch_size = 4;
  cfg.shuffle_seed = 1;
  const MlpModel init = MlpModel::identity(5);
  const TrainResult result = train(init, data, LossKind::cosine, cfg);
  REQUIRE(result.history.size() == 1);
  CHECK(result.history[0].iteration == 0);
  CHECK((result.model.weights[0] - init.weights[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training rejects undersized datasets and bad configs") {
  const Dataset data = linear_map_dataset(8, 4, 3);
  TrainConfig cfg;
  cfg.batch_size = 8;
  CHECK_THROWS_AS(train(MlpModel::identity(4), data, LossKind::cosine, cfg), ConfigError);
  cfg.batch_size = 2;
  cfg.validation_fraction = 0.7;
  CHECK_THROWS_AS(train(MlpModel::identity(4), data, LossKind::cosine, cfg), ConfigError);
}

TEST_CASE("aam training on separable clusters drives the loss down") {
  // three tight clusters, one per class
  Rng rng(55);
  Dataset data;
  std::vector<Embedding> centers;
  for (int c = 0; c < 3; ++c) centers.push_back(unit_sphere_vector(rng, 8));
  for (int i = 0; i < 120; ++i) {
    const int c = i % 3;
    data.inputs.push_back(
        l2_normalize(centers[static_cast<std::size_t>(c)] + 0.05 * gaussian_vector(rng, 8)));
    data.labels.push_back(c);
  }
  AamHead head = AamHead::from_prototypes(data.inputs, data.labels, 3, 0.2, 10.0);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 8;
  cfg.validate_every = 10;
  cfg.adam.lr = 1e-3;
  cfg.shuffle_seed = 2;
  const TrainResult result =
      train(MlpModel::identity(8), data, LossKind::aam_softmax, cfg, std::move(head));
  CHECK(result.best_val_loss < result.history.front().val_loss);
  // head columns stay unit norm through the updates
  for (int c = 0; c < result.head.n_classes(); ++c) {
    CHECK(std::abs(result.head.class_weights.col(c).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("mlp text round-trip is exact") {
  const MlpModel model = MlpModel::random({4, 7, 3}, 99);
  const MlpModel back = mlp_from_text(mlp_to_text(model));
  REQUIRE(back.n_layers() == model.n_layers());
  for (int l = 0; l < model.n_layers(); ++l) {
    const auto lu = static_cast<std::size_t>(l);
    CHECK((back.weights[lu] - model.weights[lu]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.biases[lu] - model.biases[lu]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("history csv lists one row per validation") {
  const std::vector<HistoryRow> history = {{10, 0.5, 0.6}, {20, 0.4, 0.45}};
  const std::string csv = history_to_csv(history);
  CHECK(csv == "iteration,train_loss,val_loss\n10,0.5,0.6\n20,0.4,0.45\n");
}
