// src/gradcheck.cpp

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

#include "driftlab/gradcheck.hpp"

#include <cmath>

#include "driftlab/mlp.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = probe(i);
    probe(i) = saved + h;
    const double up = f(probe);
    probe(i) = saved - h;
    const double down = f(probe);
    probe(i) = saved;
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric) {
  const double scale = std::max({analytic.cwiseAbs().maxCoeff(),
                                 numeric.cwiseAbs().maxCoeff(), 1e-12});
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

namespace {

// Flattens model parameters to one vector and back, so the whole backward
// pass can be checked against a single finite-difference sweep.
Eigen::VectorXd flatten_params(const MlpModel& model) {
  Eigen::Index total = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    total += model.weights[l].size() + model.biases[l].size();
  }
  Eigen::VectorXd flat(total);
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const auto wsize = model.weights[l].size();
    flat.segment(pos, wsize) = Eigen::Map<const Eigen::VectorXd>(model.weights[l].data(), wsize);
    pos += wsize;
    flat.segment(pos, model.biases[l].size()) = model.biases[l];
    pos += model.biases[l].size();
  }
  return flat;
}

MlpModel unflatten_params(const MlpModel& shape, const Eigen::VectorXd& flat) {
  MlpModel model = shape;
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const auto wsize = model.weights[l].size();
    Eigen::Map<Eigen::VectorXd>(model.weights[l].data(), wsize) = flat.segment(pos, wsize);
    pos += wsize;
    model.biases[l] = flat.segment(pos, model.biases[l].size());
    pos += model.biases[l].size();
  }
  return model;
}

Eigen::VectorXd flatten_grads(const MlpGradients& grads) {
  Eigen::Index total = 0;
  for (std::size_t l = 0; l < grads.d_weights.size(); ++l) {
    total += grads.d_weights[l].size() + grads.d_biases[l].size();
  }
  Eigen::VectorXd flat(total);
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < grads.d_weights.size(); ++l) {
    const auto wsize = grads.d_weights[l].size();
    flat.segment(pos, wsize) = Eigen::Map<const Eigen::VectorXd>(grads.d_weights[l].data(), wsize);
    pos += wsize;
    flat.segment(pos, grads.d_biases[l].size()) = grads.d_biases[l];
    pos += grads.d_biases[l].size();
  }
  return flat;
}

GradCheckReport check_cosine_loss(std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  const Eigen::VectorXd y = gaussian_vector(rng, 5);
  const Eigen::VectorXd target = gaussian_vector(rng, 5);
  const LossGrad analytic = cosine_loss_and_grad(y, target);
  const Eigen::VectorXd numeric = finite_diff_gradient(
      [&target](const Eigen::VectorXd& v) { return cosine_loss_and_grad(v, target).loss; }, y);
  GradCheckReport report;
  report.name = "cosine_loss/seed" + std::to_string(seed);
  report.max_rel_err = max_relative_error(analytic.d_output, numeric);
  report.pass = report.max_rel_err < tolerance;
  return report;
}

GradCheckReport check_aam_loss(std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  const int dim = 6;
  const int classes = 4;
  AamHead head = AamHead::random(dim, classes, derive_seed(seed, "gradcheck/head"));
  const Eigen::VectorXd embedding = gaussian_vector(rng, dim);
  const int label = static_cast<int>(rng.next_below(classes));

  const AamLossGrad analytic = aam_loss_and_grad(embedding, head, label);
  const Eigen::VectorXd numeric_emb = finite_diff_gradient(
      [&head, label](const Eigen::VectorXd& e) { return aam_loss_and_grad(e, head, label).loss; },
      embedding);

  // head weights flattened column-major
  const Eigen::VectorXd head_flat =
      Eigen::Map<const Eigen::VectorXd>(head.class_weights.data(), head.class_weights.size());
  const Eigen::VectorXd numeric_head = finite_diff_gradient(
      [&head, &embedding, label, dim, classes](const Eigen::VectorXd& w) {
        AamHead probe = head;
        probe.class_weights = Eigen::Map<const Eigen::MatrixXd>(w.data(), dim, classes);
        return aam_loss_and_grad(embedding, probe, label).loss;
      },
      head_flat);
  const Eigen::VectorXd analytic_head = Eigen::Map<const Eigen::VectorXd>(
      analytic.d_class_weights.data(), analytic.d_class_weights.size());

  GradCheckReport report;
  report.name = "aam_softmax/seed" + std::to_string(seed);
  report.max_rel_err = std::max(max_relative_error(analytic.d_embedding, numeric_emb),
                                max_relative_error(analytic_head, numeric_head));
  report.pass = report.max_rel_err < tolerance;
  return report;
}

GradCheckReport check_backprop(std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  const std::vector<int> dims = {32, 16, 32};
  MlpModel model = MlpModel::random(dims, derive_seed(seed, "gradcheck/model"));
  const Eigen::VectorXd x = gaussian_vector(rng, dims.front());
  const Eigen::VectorXd target = gaussian_vector(rng, dims.back());

  const ForwardTrace trace = mlp_forward_trace(model, x);
  const LossGrad lg = cosine_loss_and_grad(trace.output(), target);
  const MlpGradients analytic = backprop(model, trace, lg.d_output);

  const Eigen::VectorXd flat = flatten_params(model);
  const Eigen::VectorXd numeric = finite_diff_gradient(
      [&model, &x, &target](const Eigen::VectorXd& params) {
        const MlpModel probe = unflatten_params(model, params);
        return cosine_loss_and_grad(mlp_forward(probe, x), target).loss;
      },
      flat);

  GradCheckReport report;
  report.name = "mlp_backprop/seed" + std::to_string(seed);
  report.max_rel_err = max_relative_error(flatten_grads(analytic), numeric);
  report.pass = report.max_rel_err < tolerance;
  return report;
}

}  // namespace

std::vector<GradCheckReport> run_gradient_suite(int n_seeds, double tolerance) {
  std::vector<GradCheckReport> reports;
  reports.reserve(static_cast<std::size_t>(3 * n_seeds));
  for (int s = 0; s < n_seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    reports.push_back(check_cosine_loss(seed, tolerance));
    reports.push_back(check_aam_loss(seed, tolerance));
    reports.push_back(check_backprop(seed, tolerance));
  }
  return reports;
}

}  // namespace driftlab
