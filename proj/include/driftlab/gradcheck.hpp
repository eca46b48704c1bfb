// include/driftlab/gradcheck.hpp

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

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace driftlab {

// Central-difference verification of the analytic gradients. The numeric
// side never calls into the backward pass, only the forward losses.

/// Central finite differences of a scalar function, h = 1e-6 by default.
Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x, double h = 1e-6);

/// max_i |a_i - n_i| / max(||a||_inf, ||n||_inf, 1e-12)
double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric);

struct GradCheckReport {
  std::string name;
  double max_rel_err = 0.0;
  bool pass = false;
};

/// Checks cosine loss, AAM-softmax (embedding and head gradients) and full
/// MLP backprop against central differences across n_seeds random instances
/// each; pass iff max relative error < tolerance.
std::vector<GradCheckReport> run_gradient_suite(int n_seeds = 20, double tolerance = 1e-4);

}  // namespace driftlab
