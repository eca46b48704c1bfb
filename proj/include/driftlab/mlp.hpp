// include/driftlab/mlp.hpp

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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driftlab/embedding.hpp"

namespace driftlab {

// Minimal feed-forward machinery with exact reverse-mode gradients, written
// against finite-difference oracles. Layers are affine with tanh between
// them and identity at the output.

struct MlpModel {
  std::vector<Eigen::MatrixXd> weights;  // weights[l] maps layer l -> l+1, rows = out
  std::vector<Eigen::VectorXd> biases;

  int input_dim() const { return static_cast<int>(weights.front().cols()); }
  int output_dim() const { return static_cast<int>(weights.back().rows()); }
  int n_layers() const { return static_cast<int>(weights.size()); }

  /// Gaussian init scaled by 1/sqrt(fan_in), zero biases; weights drawn
  /// column-major per layer from Rng(seed). dims includes input and output.
  static MlpModel random(const std::vector<int>& dims, std::uint64_t seed);

  /// Single linear layer, W = I, b = 0.
  static MlpModel identity(int dim);
};

/// y = W_L tanh(... tanh(W_1 x + b_1) ...) + b_L
Embedding mlp_forward(const MlpModel& model, const Embedding& x);

/// Per-layer post-activation values kept for the backward pass;
/// activations[0] is the input, activations[L] the output.
struct ForwardTrace {
  std::vector<Eigen::VectorXd> activations;
  const Eigen::VectorXd& output() const { return activations.back(); }
};

ForwardTrace mlp_forward_trace(const MlpModel& model, const Embedding& x);

struct MlpGradients {
  std::vector<Eigen::MatrixXd> d_weights;
  std::vector<Eigen::VectorXd> d_biases;

  static MlpGradients zeros_like(const MlpModel& model);
  void accumulate(const MlpGradients& other, double weight);
};

/// Exact reverse-mode gradients of a scalar loss with respect to all
/// parameters, given dloss/doutput and the trace of the same input.
MlpGradients backprop(const MlpModel& model, const ForwardTrace& trace,
                      const Eigen::VectorXd& dloss_doutput);

/// Cosine-distance loss 1 - y.t/(|y||t|) and its exact gradient in y.
/// Scale-invariant in y; the gradient is orthogonal to y.
struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd d_output;
};
LossGrad cosine_loss_and_grad(const Eigen::VectorXd& y, const Eigen::VectorXd& target);

// Additive-angular-margin softmax. Class weights are unit-norm columns; the
// true-class logit uses cos(theta + margin), every other logit cos(theta),
// all scaled, followed by cross-entropy.
struct AamHead {
  Eigen::MatrixXd class_weights;  // dim x n_classes, unit columns
  double margin = 0.2;   // radians
  double scale = 30.0;

  int n_classes() const { return static_cast<int>(class_weights.cols()); }

  /// Random unit-norm columns from Rng(seed).
  static AamHead random(int dim, int n_classes, std::uint64_t seed,
                        double margin = 0.2, double scale = 30.0);

  /// Columns initialized to the normalized per-class mean of the given
  /// embeddings (class prototypes); deterministic in the data.
  static AamHead from_prototypes(const std::vector<Eigen::VectorXd>& embeddings,
                                 const std::vector<int>& labels, int n_classes,
                                 double margin = 0.2, double scale = 30.0);

  /// Restores unit-norm columns; call after every parameter update.
  void renormalize_columns();
};

struct AamLossGrad {
  double loss = 0.0;
  Eigen::VectorXd d_embedding;
  Eigen::MatrixXd d_class_weights;
};
AamLossGrad aam_loss_and_grad(const Eigen::VectorXd& embedding, const AamHead& head,
                              int label);

// Bias-corrected Adam. t is incremented once per step, before the update.
struct AdamHyper {
  double lr = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamTensorState {
  Eigen::ArrayXXd m, v;  // first/second moment accumulators, parameter-shaped
  static AdamTensorState zeros(Eigen::Index rows, Eigen::Index cols);
};

/// One Adam update of a single tensor:
///   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
///   param -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
void adam_step_tensor(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad,
                      AdamTensorState& state, const AdamHyper& hyper, long t);

struct AdamState {
  AdamHyper hyper;
  long t = 0;
  std::vector<AdamTensorState> weight_states, bias_states;
  AdamTensorState head_state;  // used only when training with an AAM head

  static AdamState for_model(const MlpModel& model, const AdamHyper& hyper);
  static AdamState for_model_and_head(const MlpModel& model, const AamHead& head,
                                      const AdamHyper& hyper);
};

/// Applies one Adam step to every model tensor (and the head, if given).
void adam_step(MlpModel& model, const MlpGradients& grads, AdamState& state);
void adam_step(MlpModel& model, AamHead& head, const MlpGradients& grads,
               const Eigen::MatrixXd& head_grad, AdamState& state);

// Mini-batch training with periodic validation; the returned model is the
// snapshot with the lowest recorded validation loss.
enum class LossKind { cosine, aam_softmax };

struct TrainConfig {
  int epochs = 3;
  int batch_size = 8;
  int validate_every = 200;           // iterations between validation passes
  double validation_fraction = 0.03;  // share of the dataset held out
  std::uint64_t shuffle_seed = 0;
  AdamHyper adam;
  int hidden_width_factor = 8;  // architecture of learned reversal maps
  double aam_margin = 0.2;
  double aam_scale = 30.0;

  void validate() const;
};

struct Dataset {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::VectorXd> targets;  // cosine loss
  std::vector<int> labels;               // aam_softmax
};

struct HistoryRow {
  long iteration = 0;
  double train_loss = 0.0;  // mean over batches since the previous validation
  double val_loss = 0.0;
};

struct TrainResult {
  MlpModel model;   // lowest-validation-loss snapshot
  AamHead head;     // populated for aam_softmax
  std::vector<HistoryRow> history;
  double best_val_loss = 0.0;
  long best_iteration = 0;
};

/// Splits off the validation set by shuffled index (seeded with
/// derive_seed(shuffle_seed, "train/split"); the first
/// max(1, floor(fraction*N)) shuffled indices validate). Iterates epochs x
/// batches with per-epoch shuffles seeded by derive_seed(shuffle_seed,
/// "train/epoch", e); batch gradients are the mean over items in fixed
/// order. Validation runs every validate_every iterations and once at the
/// end; ties in validation loss keep the earlier snapshot.
TrainResult train(MlpModel model, const Dataset& data, LossKind kind,
                  const TrainConfig& cfg, AamHead head = {});

/// Mean loss of the model over a dataset slice (fixed order).
double evaluate_loss(const MlpModel& model, const Dataset& data, LossKind kind,
                     const AamHead& head, const std::vector<int>& indices);

/// Text round-trip of model parameters (exact decimal doubles).
std::string mlp_to_text(const MlpModel& model);
MlpModel mlp_from_text(const std::string& text);

/// History CSV: iteration,train_loss,val_loss.
std::string history_to_csv(const std::vector<HistoryRow>& history);

}  // namespace driftlab
