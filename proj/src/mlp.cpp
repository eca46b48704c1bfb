// src/mlp.cpp

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

#include "driftlab/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "driftlab/io.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

MlpModel MlpModel::random(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw ConfigError("MlpModel::random: need at least input and output dims");
  MlpModel model;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const Eigen::Index in = dims[l];
    const Eigen::Index out = dims[l + 1];
    if (in < 1 || out < 1) throw ConfigError("MlpModel::random: layer dims must be >= 1");
    Eigen::MatrixXd w(out, in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (Eigen::Index c = 0; c < in; ++c) {  // column-major draw order
      for (Eigen::Index r = 0; r < out; ++r) w(r, c) = rng.next_gaussian() * scale;
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(out));
  }
  return model;
}

MlpModel MlpModel::identity(int dim) {
  MlpModel model;
  model.weights.push_back(Eigen::MatrixXd::Identity(dim, dim));
  model.biases.push_back(Eigen::VectorXd::Zero(dim));
  return model;
}

Embedding mlp_forward(const MlpModel& model, const Embedding& x) {
  if (x.size() != model.input_dim()) {
    throw DomainError("mlp_forward: input dimension " + std::to_string(x.size()) +
                      " does not match model input " + std::to_string(model.input_dim()));
  }
  Eigen::VectorXd a = x;
  const int layers = model.n_layers();
  for (int l = 0; l < layers; ++l) {
    a = model.weights[static_cast<std::size_t>(l)] * a + model.biases[static_cast<std::size_t>(l)];
    if (l + 1 < layers) a = a.array().tanh().matrix();
  }
  return a;
}

ForwardTrace mlp_forward_trace(const MlpModel& model, const Embedding& x) {
  if (x.size() != model.input_dim()) {
    throw DomainError("mlp_forward_trace: input dimension mismatch");
  }
  ForwardTrace trace;
  trace.activations.reserve(static_cast<std::size_t>(model.n_layers()) + 1);
  trace.activations.push_back(x);
  const int layers = model.n_layers();
  for (int l = 0; l < layers; ++l) {
    Eigen::VectorXd a = model.weights[static_cast<std::size_t>(l)] * trace.activations.back() +
                        model.biases[static_cast<std::size_t>(l)];
    if (l + 1 < layers) a = a.array().tanh().matrix();
    trace.activations.push_back(std::move(a));
  }
  return trace;
}

MlpGradients MlpGradients::zeros_like(const MlpModel& model) {
  MlpGradients g;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    g.d_weights.push_back(
        Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    g.d_biases.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
  }
  return g;
}

void MlpGradients::accumulate(const MlpGradients& other, double weight) {
  for (std::size_t l = 0; l < d_weights.size(); ++l) {
    d_weights[l] += weight * other.d_weights[l];
    d_biases[l] += weight * other.d_biases[l];
  }
}

MlpGradients backprop(const MlpModel& model, const ForwardTrace& trace,
                      const Eigen::VectorXd& dloss_doutput) {
  const int layers = model.n_layers();
  if (static_cast<int>(trace.activations.size()) != layers + 1) {
    throw DomainError("backprop: trace does not match model depth");
  }
  if (dloss_doutput.size() != model.output_dim()) {
    throw DomainError("backprop: loss gradient dimension mismatch");
  }
  MlpGradients grads = MlpGradients::zeros_like(model);
  // delta holds dloss/d(pre-activation of layer l); the output layer has an
  // identity activation, so its delta is the loss gradient itself.
  Eigen::VectorXd delta = dloss_doutput;
  for (int l = layers - 1; l >= 0; --l) {
    const auto lu = static_cast<std::size_t>(l);
    const Eigen::VectorXd& a_in = trace.activations[lu];
    grads.d_weights[lu] = delta * a_in.transpose();
    grads.d_biases[lu] = delta;
    if (l > 0) {
      // a_in is tanh(pre-activation of layer l-1): tanh' = 1 - tanh^2
      delta = (model.weights[lu].transpose() * delta).array() *
              (1.0 - a_in.array().square());
    }
  }
  return grads;
}

LossGrad cosine_loss_and_grad(const Eigen::VectorXd& y, const Eigen::VectorXd& target) {
  const double ny = y.norm();
  const double nt = target.norm();
  if (!(ny > 0.0)) throw DomainError("cosine_loss_and_grad: output has zero norm");
  if (!(nt > 0.0)) throw DomainError("cosine_loss_and_grad: target has zero norm");
  if (y.size() != target.size()) throw DomainError("cosine_loss_and_grad: dimension mismatch");
  const Eigen::VectorXd y_hat = y / ny;
  const Eigen::VectorXd t_hat = target / nt;
  const double cos = y_hat.dot(t_hat);
  LossGrad out;
  out.loss = 1.0 - cos;
  out.d_output = (cos * y_hat - t_hat) / ny;
  return out;
}

AamHead AamHead::random(int dim, int n_classes, std::uint64_t seed, double margin,
                        double scale) {
  if (n_classes < 2) throw ConfigError("AamHead: need at least 2 classes");
  AamHead head;
  head.margin = margin;
  head.scale = scale;
  head.class_weights.resize(dim, n_classes);
  Rng rng(seed);
  for (int c = 0; c < n_classes; ++c) {
    head.class_weights.col(c) = unit_sphere_vector(rng, dim);
  }
  return head;
}

AamHead AamHead::from_prototypes(const std::vector<Eigen::VectorXd>& embeddings,
                                 const std::vector<int>& labels, int n_classes,
                                 double margin, double scale) {
  if (n_classes < 2) throw ConfigError("AamHead: need at least 2 classes");
  if (embeddings.empty() || embeddings.size() != labels.size()) {
    throw ConfigError("AamHead::from_prototypes: embeddings and labels must align");
  }
  const Eigen::Index dim = embeddings.front().size();
  AamHead head;
  head.margin = margin;
  head.scale = scale;
  head.class_weights = Eigen::MatrixXd::Zero(dim, n_classes);
  std::vector<int> counts(static_cast<std::size_t>(n_classes), 0);
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    const int label = labels[i];
    if (label < 0 || label >= n_classes) {
      throw ConfigError("AamHead::from_prototypes: label out of range");
    }
    head.class_weights.col(label) += embeddings[i];
    ++counts[static_cast<std::size_t>(label)];
  }
  for (int c = 0; c < n_classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      throw ConfigError("AamHead::from_prototypes: class " + std::to_string(c) +
                        " has no embeddings");
    }
  }
  head.renormalize_columns();
  return head;
}

void AamHead::renormalize_columns() {
  for (Eigen::Index c = 0; c < class_weights.cols(); ++c) {
    const double norm = class_weights.col(c).norm();
    if (norm > 0.0) class_weights.col(c) /= norm;
  }
}

AamLossGrad aam_loss_and_grad(const Eigen::VectorXd& embedding, const AamHead& head,
                              int label) {
  const int n_classes = head.n_classes();
  if (label < 0 || label >= n_classes) {
    throw DomainError("aam_loss_and_grad: label " + std::to_string(label) +
                      " out of range [0, " + std::to_string(n_classes) + ")");
  }
  const double ne = embedding.norm();
  if (!(ne > 0.0)) throw DomainError("aam_loss_and_grad: embedding has zero norm");
  if (embedding.size() != head.class_weights.rows()) {
    throw DomainError("aam_loss_and_grad: embedding dimension mismatch");
  }

  const Eigen::VectorXd e_hat = embedding / ne;
  const Eigen::Index dim = embedding.size();

  // cos_j between the normalized embedding and each normalized class weight
  Eigen::VectorXd w_norms(n_classes), cosines(n_classes);
  for (int j = 0; j < n_classes; ++j) {
    const double nw = head.class_weights.col(j).norm();
    if (!(nw > 0.0)) throw DomainError("aam_loss_and_grad: class weight has zero norm");
    w_norms(j) = nw;
    cosines(j) = e_hat.dot(head.class_weights.col(j)) / nw;
  }

  // logits: scale * cos(theta_label + margin) on the label, scale * cos_j
  // elsewhere; cosines clamped away from the poles so the angle chain rule
  // stays finite
  constexpr double kClamp = 1.0 - 1e-12;
  Eigen::VectorXd logits = head.scale * cosines;
  const double cos_label = std::clamp(cosines(label), -kClamp, kClamp);
  const double theta = std::acos(cos_label);
  logits(label) = head.scale * std::cos(theta + head.margin);

  // softmax cross-entropy, max-shifted
  const double max_logit = logits.maxCoeff();
  const Eigen::VectorXd exps = (logits.array() - max_logit).exp();
  const double sum_exp = exps.sum();
  const double loss = -(logits(label) - max_logit) + std::log(sum_exp);

  Eigen::VectorXd dlogits = exps / sum_exp;
  dlogits(label) -= 1.0;

  // dlogit_j/dcos_j: scale everywhere except the label, where the margin
  // enters through theta: d/dcos cos(acos(cos) + m) = sin(theta + m)/sin(theta)
  Eigen::VectorXd dcos = head.scale * dlogits;
  const double sin_theta = std::sin(theta);
  dcos(label) = dlogits(label) * head.scale * std::sin(theta + head.margin) /
                std::max(sin_theta, 1e-12);

  AamLossGrad out;
  out.loss = loss;
  out.d_embedding = Eigen::VectorXd::Zero(dim);
  out.d_class_weights = Eigen::MatrixXd::Zero(dim, n_classes);
  for (int j = 0; j < n_classes; ++j) {
    const Eigen::VectorXd w_hat = head.class_weights.col(j) / w_norms(j);
    // dcos/de = (w_hat - cos e_hat)/|e|, dcos/dw = (e_hat - cos w_hat)/|w|
    out.d_embedding += dcos(j) * (w_hat - cosines(j) * e_hat) / ne;
    out.d_class_weights.col(j) = dcos(j) * (e_hat - cosines(j) * w_hat) / w_norms(j);
  }
  return out;
}

AdamTensorState AdamTensorState::zeros(Eigen::Index rows, Eigen::Index cols) {
  AdamTensorState s;
  s.m = Eigen::ArrayXXd::Zero(rows, cols);
  s.v = Eigen::ArrayXXd::Zero(rows, cols);
  return s;
}

void adam_step_tensor(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad,
                      AdamTensorState& state, const AdamHyper& hyper, long t) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols()) {
    throw DomainError("adam_step_tensor: gradient shape mismatch");
  }
  if (t < 1) throw DomainError("adam_step_tensor: step counter must be >= 1");
  const Eigen::ArrayXXd g = grad.array();
  state.m = hyper.beta1 * state.m + (1.0 - hyper.beta1) * g;
  state.v = hyper.beta2 * state.v + (1.0 - hyper.beta2) * g.square();
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(t));
  param.array() -= hyper.lr * (state.m / bc1) / ((state.v / bc2).sqrt() + hyper.eps);
}

AdamState AdamState::for_model(const MlpModel& model, const AdamHyper& hyper) {
  AdamState s;
  s.hyper = hyper;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    s.weight_states.push_back(
        AdamTensorState::zeros(model.weights[l].rows(), model.weights[l].cols()));
    s.bias_states.push_back(AdamTensorState::zeros(model.biases[l].size(), 1));
  }
  return s;
}

AdamState AdamState::for_model_and_head(const MlpModel& model, const AamHead& head,
                                        const AdamHyper& hyper) {
  AdamState s = for_model(model, hyper);
  s.head_state = AdamTensorState::zeros(head.class_weights.rows(), head.class_weights.cols());
  return s;
}

void adam_step(MlpModel& model, const MlpGradients& grads, AdamState& state) {
  ++state.t;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    adam_step_tensor(model.weights[l], grads.d_weights[l], state.weight_states[l],
                     state.hyper, state.t);
    Eigen::Ref<Eigen::MatrixXd> bias_ref(model.biases[l]);
    adam_step_tensor(bias_ref, grads.d_biases[l], state.bias_states[l], state.hyper, state.t);
  }
}

void adam_step(MlpModel& model, AamHead& head, const MlpGradients& grads,
               const Eigen::MatrixXd& head_grad, AdamState& state) {
  ++state.t;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    adam_step_tensor(model.weights[l], grads.d_weights[l], state.weight_states[l],
                     state.hyper, state.t);
    Eigen::Ref<Eigen::MatrixXd> bias_ref(model.biases[l]);
    adam_step_tensor(bias_ref, grads.d_biases[l], state.bias_states[l], state.hyper, state.t);
  }
  adam_step_tensor(head.class_weights, head_grad, state.head_state, state.hyper, state.t);
  head.renormalize_columns();
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (validate_every < 1) throw ConfigError("train.validate_every must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 0.5)) {
    throw ConfigError("train.validation_fraction must be in (0, 0.5)");
  }
  if (!(adam.lr > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (hidden_width_factor < 1) throw ConfigError("train.hidden_width_factor must be >= 1");
  if (!(aam_margin >= 0.0)) throw ConfigError("train.aam_margin must be >= 0");
  if (!(aam_scale > 0.0)) throw ConfigError("train.aam_scale must be > 0");
}

namespace {

struct SampleLoss {
  double loss = 0.0;
  MlpGradients grads;
  Eigen::MatrixXd head_grad;
};

// Loss and parameter gradients of one sample.
SampleLoss sample_loss_and_grads(const MlpModel& model, const AamHead& head,
                                 const Dataset& data, LossKind kind, int index) {
  const auto iu = static_cast<std::size_t>(index);
  const ForwardTrace trace = mlp_forward_trace(model, data.inputs[iu]);
  SampleLoss out;
  if (kind == LossKind::cosine) {
    const LossGrad lg = cosine_loss_and_grad(trace.output(), data.targets[iu]);
    out.loss = lg.loss;
    out.grads = backprop(model, trace, lg.d_output);
  } else {
    const AamLossGrad lg = aam_loss_and_grad(trace.output(), head, data.labels[iu]);
    out.loss = lg.loss;
    out.grads = backprop(model, trace, lg.d_embedding);
    out.head_grad = lg.d_class_weights;
  }
  return out;
}

double sample_loss_only(const MlpModel& model, const AamHead& head, const Dataset& data,
                        LossKind kind, int index) {
  const auto iu = static_cast<std::size_t>(index);
  const Embedding y = mlp_forward(model, data.inputs[iu]);
  if (kind == LossKind::cosine) return cosine_loss_and_grad(y, data.targets[iu]).loss;
  return aam_loss_and_grad(y, head, data.labels[iu]).loss;
}

void shuffle_indices(std::vector<int>& idx, Rng& rng) {
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
    const std::size_t j = i + rng.next_below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
}

}  // namespace

double evaluate_loss(const MlpModel& model, const Dataset& data, LossKind kind,
                     const AamHead& head, const std::vector<int>& indices) {
  if (indices.empty()) throw ConfigError("evaluate_loss: empty index set");
  double sum = 0.0;
  for (int i : indices) sum += sample_loss_only(model, head, data, kind, i);
  return sum / static_cast<double>(indices.size());
}

TrainResult train(MlpModel model, const Dataset& data, LossKind kind, const TrainConfig& cfg,
                  AamHead head) {
  cfg.validate();
  const int n = static_cast<int>(data.inputs.size());
  if (n <= cfg.batch_size) {
    throw ConfigError("train: dataset size " + std::to_string(n) +
                      " must exceed batch_size " + std::to_string(cfg.batch_size));
  }
  if (kind == LossKind::cosine && data.targets.size() != data.inputs.size()) {
    throw ConfigError("train: cosine loss needs one target per input");
  }
  if (kind == LossKind::aam_softmax) {
    if (data.labels.size() != data.inputs.size()) {
      throw ConfigError("train: aam_softmax needs one label per input");
    }
    if (head.class_weights.size() == 0) {
      throw ConfigError("train: aam_softmax needs an initialized head");
    }
  }

  // validation split by shuffled index
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  Rng split_rng(derive_seed(cfg.shuffle_seed, "train/split"));
  shuffle_indices(all, split_rng);
  const int n_val = std::max(
      1, static_cast<int>(std::floor(cfg.validation_fraction * static_cast<double>(n))));
  const std::vector<int> val_idx(all.begin(), all.begin() + n_val);
  std::vector<int> train_idx(all.begin() + n_val, all.end());
  if (train_idx.empty()) throw ConfigError("train: no training samples after validation split");

  AdamState adam = (kind == LossKind::aam_softmax)
                       ? AdamState::for_model_and_head(model, head, cfg.adam)
                       : AdamState::for_model(model, cfg.adam);

  TrainResult result;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  result.best_iteration = 0;

  long iteration = 0;
  double train_loss_sum = 0.0;
  long train_loss_count = 0;
  bool validated_at_last_iteration = false;

  auto run_validation = [&]() {
    const double val_loss = evaluate_loss(model, data, kind, head, val_idx);
    const double train_loss = train_loss_count > 0
                                  ? train_loss_sum / static_cast<double>(train_loss_count)
                                  : std::numeric_limits<double>::quiet_NaN();
    result.history.push_back({iteration, train_loss, val_loss});
    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.best_iteration = iteration;
      result.model = model;
      result.head = head;
    }
    train_loss_sum = 0.0;
    train_loss_count = 0;
  };

  const auto grad_scale = [](std::size_t batch) { return 1.0 / static_cast<double>(batch); };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng epoch_rng(derive_seed(cfg.shuffle_seed, "train/epoch", static_cast<std::uint64_t>(epoch)));
    shuffle_indices(train_idx, epoch_rng);
    for (std::size_t start = 0; start < train_idx.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(train_idx.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::size_t batch = stop - start;

      MlpGradients batch_grads = MlpGradients::zeros_like(model);
      Eigen::MatrixXd head_grads;
      if (kind == LossKind::aam_softmax) {
        head_grads = Eigen::MatrixXd::Zero(head.class_weights.rows(), head.class_weights.cols());
      }
      double batch_loss = 0.0;
      for (std::size_t i = start; i < stop; ++i) {
        const SampleLoss sl = sample_loss_and_grads(model, head, data, kind, train_idx[i]);
        batch_loss += sl.loss;
        batch_grads.accumulate(sl.grads, grad_scale(batch));
        if (kind == LossKind::aam_softmax) head_grads += grad_scale(batch) * sl.head_grad;
      }
      batch_loss /= static_cast<double>(batch);

      if (kind == LossKind::aam_softmax) {
        adam_step(model, head, batch_grads, head_grads, adam);
      } else {
        adam_step(model, batch_grads, adam);
      }

      ++iteration;
      train_loss_sum += batch_loss;
      ++train_loss_count;
      validated_at_last_iteration = false;
      if (iteration % cfg.validate_every == 0) {
        run_validation();
        validated_at_last_iteration = true;
      }
    }
  }

  if (!validated_at_last_iteration) run_validation();
  return result;
}

std::string mlp_to_text(const MlpModel& model) {
  std::string out = "layers," + std::to_string(model.n_layers()) + "\n";
  for (int l = 0; l < model.n_layers(); ++l) {
    const auto lu = static_cast<std::size_t>(l);
    const Eigen::MatrixXd& w = model.weights[lu];
    out += "weight," + std::to_string(w.rows()) + "," + std::to_string(w.cols()) + "\n";
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        if (c > 0) out += ",";
        out += format_double(w(r, c));
      }
      out += "\n";
    }
    const Eigen::VectorXd& b = model.biases[lu];
    out += "bias," + std::to_string(b.size()) + "\n";
    for (Eigen::Index r = 0; r < b.size(); ++r) {
      if (r > 0) out += ",";
      out += format_double(b(r));
    }
    out += "\n";
  }
  return out;
}

MlpModel mlp_from_text(const std::string& text) {
  const auto lines = split_lines(text);
  std::size_t li = 0;
  if (lines.empty()) throw ProtocolError("mlp_from_text: empty input");
  const auto header = split_csv_line(lines[li++]);
  if (header.size() != 2 || header[0] != "layers") {
    throw ProtocolError("mlp_from_text: missing layers header");
  }
  const long layers = parse_long(header[1]);
  MlpModel model;
  for (long l = 0; l < layers; ++l) {
    if (li >= lines.size()) throw ProtocolError("mlp_from_text: truncated");
    const auto wh = split_csv_line(lines[li++]);
    if (wh.size() != 3 || wh[0] != "weight") throw ProtocolError("mlp_from_text: expected weight");
    const long rows = parse_long(wh[1]);
    const long cols = parse_long(wh[2]);
    Eigen::MatrixXd w(rows, cols);
    for (long r = 0; r < rows; ++r) {
      const auto fields = split_csv_line(lines.at(li++));
      if (static_cast<long>(fields.size()) != cols) {
        throw ProtocolError("mlp_from_text: bad weight row");
      }
      for (long c = 0; c < cols; ++c) w(r, c) = parse_double(fields[static_cast<std::size_t>(c)]);
    }
    const auto bh = split_csv_line(lines.at(li++));
    if (bh.size() != 2 || bh[0] != "bias") throw ProtocolError("mlp_from_text: expected bias");
    const long bsize = parse_long(bh[1]);
    const auto bfields = split_csv_line(lines.at(li++));
    if (static_cast<long>(bfields.size()) != bsize) {
      throw ProtocolError("mlp_from_text: bad bias row");
    }
    Eigen::VectorXd b(bsize);
    for (long r = 0; r < bsize; ++r) b(r) = parse_double(bfields[static_cast<std::size_t>(r)]);
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  return model;
}

std::string history_to_csv(const std::vector<HistoryRow>& history) {
  std::string out = "iteration,train_loss,val_loss\n";
  for (const HistoryRow& row : history) {
    out += std::to_string(row.iteration);
    out += ",";
    out += format_double(row.train_loss);
    out += ",";
    out += format_double(row.val_loss);
    out += "\n";
  }
  return out;
}

}  // namespace driftlab
