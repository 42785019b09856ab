// Copyright 2026 The Credx Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>

#include <Eigen/Dense>

namespace credx::internal {

// Solves A x = b for symmetric positive semi-definite A via LDLT. Returns
// nullopt when A is numerically singular (smallest pivot below
// 1e-12 times the largest) or the solution is not finite.
inline std::optional<Eigen::VectorXd> SolveSymmetric(const Eigen::MatrixXd& A,
                                                     const Eigen::VectorXd& b) {
  if (A.rows() == 0) return Eigen::VectorXd();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success) return std::nullopt;
  const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
  const double largest = pivots.maxCoeff();
  if (!(largest > 0.0) || pivots.minCoeff() <= 1e-12 * largest) return std::nullopt;
  Eigen::VectorXd x = ldlt.solve(b);
  if (!x.allFinite()) return std::nullopt;
  return x;
}

}  // namespace credx::internal
