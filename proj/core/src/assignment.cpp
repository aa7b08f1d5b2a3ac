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
#include "objfusion/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

namespace objfusion {
namespace {

constexpr long kMaxBids = 50'000'000;

bool forbidden(double c) { return !(c < kForbiddenCost); }

void check_shape(const CostMatrix& cost, const char* who) {
  if (cost.rows() > cost.cols()) {
    throw std::invalid_argument(std::string(who) +
                                ": more rows than columns");
  }
  for (Eigen::Index r = 0; r < cost.rows(); ++r) {
    bool admissible = false;
    for (Eigen::Index c = 0; c < cost.cols(); ++c) {
      if (std::isnan(cost(r, c))) {
        throw std::invalid_argument(std::string(who) + ": NaN cost");
      }
      admissible = admissible || !forbidden(cost(r, c));
    }
    if (!admissible) {
      throw std::runtime_error(std::string(who) + ": row " +
                               std::to_string(r) + " is entirely forbidden");
    }
  }
}

void finish(const CostMatrix& cost, Assignment& a, const char* who) {
  a.total_cost = 0.0;
  for (std::size_t r = 0; r < a.col.size(); ++r) {
    const double c = cost(static_cast<Eigen::Index>(r), a.col[r]);
    if (forbidden(c)) {
      throw std::runtime_error(std::string(who) +
                               ": assignment uses a forbidden entry at row " +
                               std::to_string(r));
    }
    a.total_cost += c;
  }
  a.n_existing = static_cast<int>(cost.cols());
}

}  // namespace

Assignment hungarian_assign(const CostMatrix& cost) {
  check_shape(cost, "hungarian_assign");
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  Assignment out;
  out.col.assign(static_cast<std::size_t>(n), -1);
  if (n == 0) {
    out.n_existing = m;
    return out;
  }
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; p[j] is the row matched to column j (0 = free).
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) {
      out.col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
    }
  }
  finish(cost, out, "hungarian_assign");
  return out;
}

Assignment auction_assign(const CostMatrix& cost, double epsilon,
                          AuctionStats* stats) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("auction_assign: epsilon must be positive");
  }
  check_shape(cost, "auction_assign");
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  Assignment out;
  out.col.assign(static_cast<std::size_t>(n), -1);
  if (n == 0) {
    out.n_existing = m;
    return out;
  }

  // Square up with zero-benefit dummy bidders. The slackness bound then
  // scales with m, so the final epsilon is tightened by n / m to keep the
  // total within n * epsilon of the optimum.
  const double final_eps = epsilon * static_cast<double>(n) / m;
  double max_abs = 0.0;
  for (Eigen::Index r = 0; r < cost.rows(); ++r) {
    for (Eigen::Index c = 0; c < cost.cols(); ++c) {
      if (!forbidden(cost(r, c))) {
        max_abs = std::max(max_abs, std::fabs(cost(r, c)));
      }
    }
  }
  auto benefit = [&](int person, int object) {
    if (person >= n) return 0.0;
    const double c = cost(person, object);
    return forbidden(c) ? -kForbiddenCost : -c;
  };

  std::vector<double> price(static_cast<std::size_t>(m), 0.0);
  std::vector<int> owner(static_cast<std::size_t>(m), -1);
  std::vector<int> assigned(static_cast<std::size_t>(m), -1);
  double eps = std::max(max_abs / 4.0, final_eps);
  long bids = 0;
  int phases = 0;
  while (true) {
    ++phases;
    std::fill(owner.begin(), owner.end(), -1);
    std::fill(assigned.begin(), assigned.end(), -1);
    std::deque<int> unassigned;
    for (int i = 0; i < m; ++i) unassigned.push_back(i);
    while (!unassigned.empty()) {
      const int person = unassigned.front();
      unassigned.pop_front();
      int best = -1;
      double v1 = -std::numeric_limits<double>::infinity();
      double v2 = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) {
        const double val = benefit(person, j) - price[j];
        if (val > v1) {
          v2 = v1;
          v1 = val;
          best = j;
        } else if (val > v2) {
          v2 = val;
        }
      }
      const double increment = (m > 1) ? (v1 - v2) + eps : eps;
      price[best] += increment;
      if (owner[best] >= 0) {
        assigned[owner[best]] = -1;
        unassigned.push_back(owner[best]);
      }
      owner[best] = person;
      assigned[person] = best;
      if (++bids > kMaxBids) {
        throw std::runtime_error("auction_assign: bid cap exceeded");
      }
    }
    if (eps <= final_eps) {
      break;
    }
    eps = std::max(eps / 5.0, final_eps);
  }
  for (int i = 0; i < n; ++i) {
    out.col[static_cast<std::size_t>(i)] = assigned[i];
  }
  if (stats != nullptr) {
    stats->bids = bids;
    stats->phases = phases;
  }
  finish(cost, out, "auction_assign");
  return out;
}

CostMatrix augment_for_birth(const CostMatrix& cost, double gate) {
  if (!(gate > 0.0)) {
    throw std::invalid_argument("augment_for_birth: gate must be positive");
  }
  const Eigen::Index k = cost.rows();
  const Eigen::Index n = cost.cols();
  CostMatrix out = CostMatrix::Constant(k, n + k, kForbiddenCost);
  out.leftCols(n) = cost;
  for (Eigen::Index r = 0; r < k; ++r) {
    out(r, n + r) = gate;
  }
  return out;
}

Assignment with_existing(Assignment a, int n_existing) {
  a.n_existing = n_existing;
  return a;
}

}  // namespace objfusion
