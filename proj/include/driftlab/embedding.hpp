// include/driftlab/embedding.hpp

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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "driftlab/errors.hpp"

namespace driftlab {

// Speaker embeddings are plain dense vectors of doubles. All arithmetic in
// the project is 64-bit; all functions here are pure.
using Embedding = Eigen::VectorXd;

using SpeakerId = std::int32_t;
using UtteranceId = std::int32_t;

namespace detail {
inline void require_nonzero_norm(double norm, const char* op, const char* arg) {
  if (!(norm > 0.0)) {
    throw DomainError(std::string(op) + ": " + arg + " has zero norm");
  }
}
}  // namespace detail

/// Cosine similarity a.b / (|a||b|), in [-1, 1] up to rounding.
template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                         const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw DomainError("cosine_similarity: dimension mismatch (" +
                      std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  const double na = a.norm();
  const double nb = b.norm();
  detail::require_nonzero_norm(na, "cosine_similarity", "first argument");
  detail::require_nonzero_norm(nb, "cosine_similarity", "second argument");
  return a.dot(b) / (na * nb);
}

/// Cosine distance 1 - cosine similarity, in [0, 2] up to rounding.
template <typename DerivedA, typename DerivedB>
double cosine_distance(const Eigen::MatrixBase<DerivedA>& a,
                       const Eigen::MatrixBase<DerivedB>& b) {
  return 1.0 - cosine_similarity(a, b);
}

/// Scales the vector to unit norm.
template <typename Derived>
Embedding l2_normalize(const Eigen::MatrixBase<Derived>& v) {
  const double norm = v.norm();
  detail::require_nonzero_norm(norm, "l2_normalize", "input");
  return v / norm;
}

/// Componentwise arithmetic mean, computed in two passes (naive mean plus a
/// correction by the mean residual). The correction makes the mean of k
/// copies of a vector reproduce it bit for bit. Not renormalized; callers
/// that need a unit vector normalize explicitly.
inline Embedding centroid(std::span<const Embedding> vs) {
  if (vs.empty()) throw DomainError("centroid: empty input list");
  const Eigen::Index dim = vs.front().size();
  Embedding sum = Embedding::Zero(dim);
  for (const Embedding& v : vs) {
    if (v.size() != dim) {
      throw DomainError("centroid: inconsistent dimensions (" + std::to_string(dim) +
                        " vs " + std::to_string(v.size()) + ")");
    }
    sum += v;
  }
  const double count = static_cast<double>(vs.size());
  Embedding mean = sum / count;
  Embedding residual = Embedding::Zero(dim);
  for (const Embedding& v : vs) residual += v - mean;
  return mean + residual / count;
}

inline Embedding centroid(const std::vector<Embedding>& vs) {
  return centroid(std::span<const Embedding>(vs));
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

}  // namespace driftlab
