/******************************************************************************
 * Copyright 2026 The objfusion Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace objfusion {

/// Rows are sensor detections, columns are candidates (global objects, and
/// after augment_for_birth one birth column per detection). Costs are
/// minimized.
using CostMatrix = Eigen::MatrixXd;

/// Entries at or above this value are forbidden pairings.
inline constexpr double kForbiddenCost = 1e9;

struct Assignment {
  /// col[k] is the column assigned to row k.
  std::vector<int> col;
  /// Sum of the assigned entries.
  double total_cost = 0.0;
  /// Number of real (non-birth) columns; rows mapped to col >= n_existing
  /// create new objects.
  int n_existing = 0;

  bool is_birth(int row) const { return col.at(row) >= n_existing; }
};

/// Exact minimum-cost one-to-one assignment of every row (rows <= cols).
/// Shortest augmenting path with potentials, O(rows^2 cols).
/// Throws std::invalid_argument for rows > cols, std::runtime_error when a
/// row has no admissible column or the optimum uses a forbidden entry.
Assignment hungarian_assign(const CostMatrix& cost);

struct AuctionStats {
  long bids = 0;
  int phases = 0;
};

/// Forward auction with epsilon scaling (start at max|entry|/4, divide by 5
/// down to `epsilon`). The result satisfies epsilon-complementary slackness,
/// so its total cost is within rows * epsilon of the optimum.
/// Throws std::invalid_argument for epsilon <= 0 or rows > cols and
/// std::runtime_error if the bid cap is hit or a forbidden entry is used.
Assignment auction_assign(const CostMatrix& cost, double epsilon,
                          AuctionStats* stats = nullptr);

/// K x (N + K): appends one birth column per row carrying `gate` on the
/// diagonal and kForbiddenCost elsewhere.
CostMatrix augment_for_birth(const CostMatrix& cost, double gate);

/// Rows of an augmented matrix of width N + K that map to N or beyond are
/// births.
Assignment with_existing(Assignment a, int n_existing);

}  // namespace objfusion
