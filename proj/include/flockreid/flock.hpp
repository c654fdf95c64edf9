// Flock construction over ordered camera galleries and the flock-similarity
// matching that resolves a target against every candidate gallery flock.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "flockreid/assignment.hpp"

namespace flockreid {

/// Contiguous run of `size` positions in an ordered list. `target_offset`
/// marks the position of the designated individual inside the window
/// (for gallery windows, the member matched to the query target).
struct FlockWindow {
  Eigen::Index start = 0;
  Eigen::Index size = 1;
  Eigen::Index target_offset = 0;
};

/// Result of matching two equal-size flocks: the maximal mean similarity
/// over one-to-one pairings, the pairing itself (row -> column inside the
/// window blocks), and the absolute gallery index matched to the target
/// once a window-level operation has resolved it (-1 until then).
struct FlockMatch {
  double similarity = 0.0;
  std::vector<Eigen::Index> pairing;
  Eigen::Index target_match = -1;
};

/// Similarity between two flocks given the block of pairwise individual
/// similarities (rows: flock A members, columns: flock B members).
/// Degenerates to the single entry for 1x1 blocks.
template <typename Derived>
FlockMatch flock_similarity(const Eigen::MatrixBase<Derived>& p_block) {
  Assignment best = solve_max_assignment(p_block);
  FlockMatch match;
  match.similarity = best.objective;
  match.pairing = std::move(best.mapping);
  return match;
}

/// Window of exactly `size` consecutive positions containing `target`,
/// centered when possible and clamped at the list boundaries. `size` must
/// be odd so that an interior window has a well-defined center.
inline FlockWindow centered_window(Eigen::Index list_len, Eigen::Index target, Eigen::Index size) {
  if (size < 1 || size > list_len) {
    throw std::invalid_argument("centered_window: flock size " + std::to_string(size) +
                                " not in [1, " + std::to_string(list_len) + "]");
  }
  if (size % 2 == 0) {
    throw std::invalid_argument("centered_window: flock size must be odd, got " +
                                std::to_string(size));
  }
  if (target < 0 || target >= list_len) {
    throw std::out_of_range("centered_window: target " + std::to_string(target) +
                            " outside [0, " + std::to_string(list_len) + ")");
  }
  const Eigen::Index start = std::clamp(target - (size - 1) / 2, Eigen::Index(0), list_len - size);
  return FlockWindow{start, size, target - start};
}

/// Scans every contiguous gallery window of the query's size (stride 1,
/// cols - size + 1 candidates) and returns the one with maximal flock
/// similarity; ties go to the smallest start index. The returned match has
/// target_match set to the absolute gallery index paired with the target.
template <typename Derived>
std::pair<FlockWindow, FlockMatch> best_gallery_flock(const Eigen::MatrixBase<Derived>& similarities,
                                                      const FlockWindow& query) {
  const Eigen::Index k = query.size;
  if (query.start < 0 || query.start + k > similarities.rows()) {
    throw std::out_of_range("best_gallery_flock: query window outside the matrix rows");
  }
  if (k > similarities.cols()) {
    throw std::invalid_argument("best_gallery_flock: gallery shorter than the flock size");
  }

  FlockWindow best_window;
  FlockMatch best_match;
  best_match.similarity = -1.0;
  for (Eigen::Index start = 0; start + k <= similarities.cols(); ++start) {
    FlockMatch match = flock_similarity(similarities.block(query.start, start, k, k));
    if (match.similarity > best_match.similarity) {
      best_match = std::move(match);
      best_window.start = start;
    }
  }
  best_window.size = k;
  best_window.target_offset = best_match.pairing[query.target_offset];
  best_match.target_match = best_window.start + best_window.target_offset;
  return {best_window, best_match};
}

/// Gallery index predicted for `target`: build the flock centered on the
/// target, find the best-matching gallery flock, and read off the member
/// paired with the target inside it.
template <typename Derived>
Eigen::Index match_target(const Eigen::MatrixBase<Derived>& similarities, Eigen::Index target,
                          Eigen::Index flock_size) {
  const FlockWindow query = centered_window(similarities.rows(), target, flock_size);
  return best_gallery_flock(similarities, query).second.target_match;
}

/// Grid of flock similarities between every query window and every gallery
/// window: entry (i, j) compares the windows starting at row i and column j.
/// For flock_size 1 this is the input matrix itself.
template <typename Derived>
Eigen::MatrixXd flock_similarity_grid(const Eigen::MatrixBase<Derived>& similarities,
                                      Eigen::Index flock_size) {
  if (flock_size < 1 || flock_size % 2 == 0) {
    throw std::invalid_argument("flock_similarity_grid: flock size must be odd and >= 1");
  }
  if (flock_size > similarities.rows() || flock_size > similarities.cols()) {
    throw std::invalid_argument("flock_similarity_grid: flock size exceeds matrix extent");
  }
  const Eigen::Index rows = similarities.rows() - flock_size + 1;
  const Eigen::Index cols = similarities.cols() - flock_size + 1;
  Eigen::MatrixXd grid(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      grid(i, j) = flock_similarity(similarities.block(i, j, flock_size, flock_size)).similarity;
    }
  }
  return grid;
}

}  // namespace flockreid
