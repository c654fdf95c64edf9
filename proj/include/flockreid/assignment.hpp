// Exact solvers for the square linear assignment problem: an O(n^3)
// shortest-augmenting-path solver and an O(n!) enumeration oracle.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace flockreid {

/// One-to-one matching between rows and columns of a square matrix.
/// mapping[i] is the column assigned to row i; the objective is always
/// recomputable from the input matrix along the mapping.
struct Assignment {
  std::vector<Eigen::Index> mapping;
  double objective = 0.0;
};

enum class OptimizeSense { Min, Max };

/// Largest order the enumeration oracle accepts (9! permutations stays
/// comfortably sub-second).
inline constexpr Eigen::Index kOracleOrderCap = 9;

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square with order >= 1, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

// Shortest-augmenting-path (Jonker-Volgenant style) over real costs.
// Row-major storage so the inner column scans are contiguous.
template <typename Scalar>
std::vector<Eigen::Index> min_cost_mapping(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& cost) {
  const Eigen::Index n = cost.rows();
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();

  // 1-based arrays with column 0 as the virtual unmatched slot.
  std::vector<Scalar> u(n + 1, Scalar(0)), v(n + 1, Scalar(0)), min_to(n + 1);
  std::vector<Eigen::Index> matched_row(n + 1, 0), prev_col(n + 1, 0);
  std::vector<char> used(n + 1, 0);

  for (Eigen::Index i = 1; i <= n; ++i) {
    matched_row[0] = i;
    Eigen::Index j0 = 0;
    std::fill(min_to.begin(), min_to.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = matched_row[j0];
      Eigen::Index j1 = 0;
      Scalar delta = inf;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Scalar reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < min_to[j]) {
          min_to[j] = reduced;
          prev_col[j] = j0;
        }
        if (min_to[j] < delta) {
          delta = min_to[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[matched_row[j]] += delta;
          v[j] -= delta;
        } else {
          min_to[j] -= delta;
        }
      }
      j0 = j1;
    } while (matched_row[j0] != 0);
    // Augment along the alternating path back to the virtual column.
    do {
      const Eigen::Index j1 = prev_col[j0];
      matched_row[j0] = matched_row[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Eigen::Index> mapping(n, -1);
  for (Eigen::Index j = 1; j <= n; ++j) mapping[matched_row[j] - 1] = j - 1;
  return mapping;
}

}  // namespace detail

/// Minimum-total-cost assignment. Entries must be finite and non-negative.
template <typename Derived>
Assignment solve_min_assignment(const Eigen::MatrixBase<Derived>& costs) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(costs, "solve_min_assignment");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> c = costs;
  if (!c.allFinite() || (c.array() < Scalar(0)).any()) {
    throw std::invalid_argument("solve_min_assignment: entries must be finite and >= 0");
  }

  Assignment result;
  if (c.rows() == 1) {
    result.mapping = {0};
    result.objective = static_cast<double>(c(0, 0));
    return result;
  }
  result.mapping = detail::min_cost_mapping<Scalar>(c);
  double total = 0.0;
  for (Eigen::Index i = 0; i < c.rows(); ++i) total += static_cast<double>(c(i, result.mapping[i]));
  result.objective = total;
  return result;
}

/// Maximum-mean-similarity assignment over entries in [0,1]. The objective
/// is the mean of the matched similarities; it equals
/// 1 - solve_min_assignment(1 - P).objective / n.
template <typename Derived>
Assignment solve_max_assignment(const Eigen::MatrixBase<Derived>& similarities) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(similarities, "solve_max_assignment");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> p = similarities;
  if (!p.allFinite() || (p.array() < Scalar(0)).any() || (p.array() > Scalar(1)).any()) {
    throw std::out_of_range("solve_max_assignment: entries must lie in [0,1]");
  }

  const Eigen::Index n = p.rows();
  Assignment result;
  if (n == 1) {
    result.mapping = {0};
    result.objective = static_cast<double>(p(0, 0));
    return result;
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> costs =
      (Scalar(1) - p.array()).matrix();
  result.mapping = detail::min_cost_mapping<Scalar>(costs);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += static_cast<double>(p(i, result.mapping[i]));
  result.objective = total / static_cast<double>(n);
  return result;
}

/// Exhaustive enumeration over all n! permutations. Test oracle; refuses
/// orders above `order_cap`. Min sense reports the total cost (mirroring
/// solve_min_assignment), max sense the mean (mirroring solve_max_assignment).
template <typename Derived>
Assignment brute_force_assignment(const Eigen::MatrixBase<Derived>& matrix, OptimizeSense sense,
                                  Eigen::Index order_cap = kOracleOrderCap) {
  detail::require_square(matrix, "brute_force_assignment");
  const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> m = matrix;
  if (!m.allFinite()) {
    throw std::invalid_argument("brute_force_assignment: entries must be finite");
  }
  const Eigen::Index n = m.rows();
  if (n > order_cap) {
    throw std::length_error("brute_force_assignment: order " + std::to_string(n) +
                            " exceeds the oracle cap of " + std::to_string(order_cap));
  }

  std::vector<Eigen::Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index(0));
  std::vector<Eigen::Index> best = perm;
  double best_total = sense == OptimizeSense::Min ? std::numeric_limits<double>::infinity()
                                                  : -std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += static_cast<double>(m(i, perm[i]));
    const bool better = sense == OptimizeSense::Min ? total < best_total : total > best_total;
    if (better) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Assignment result;
  result.mapping = std::move(best);
  result.objective = sense == OptimizeSense::Min ? best_total : best_total / static_cast<double>(n);
  return result;
}

}  // namespace flockreid
