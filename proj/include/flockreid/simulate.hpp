// Ground-truth camera orderings, the normal-perturbation model for
// relative-position change, and a synthetic appearance generator standing
// in for an external individual-similarity source.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace flockreid {

/// Appearance orders of N vehicles under two cameras. Camera1 order is the
/// identity by construction (vehicle i appears at position i); y[i] is the
/// Camera2 appearance order of vehicle i and is always a permutation.
struct CameraOrdering {
  std::vector<Eigen::Index> y;

  Eigen::Index size() const { return static_cast<Eigen::Index>(y.size()); }

  static CameraOrdering identity(Eigen::Index n) {
    CameraOrdering ordering;
    ordering.y.resize(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ordering.y[static_cast<size_t>(i)] = i;
    return ordering;
  }
};

/// Positional noise model: each vehicle's Camera2 slot comes from re-ranking
/// samples s_i ~ N(i, scale).
struct PerturbationModel {
  double scale = 0.0;
  std::uint64_t seed = 0;
};

/// Calibration of the synthetic appearance generator. Defaults are the
/// pinned calibration referenced by the experiment defaults and the
/// acceptance thresholds (see configs/default_appearance.json).
struct SyntheticAppearanceConfig {
  Eigen::Index latent_dim = 3;
  double duplicate_prob = 0.40;
  double view_noise = 0.25;
  double kernel_width = 0.5;
  std::uint64_t seed = 0;
};

/// Checks that `values` is a permutation of {0,...,n-1}. Returns the first
/// duplicated value via `duplicate` when it is not (or -1 if the defect is
/// an out-of-range entry, reported via `out_of_range`).
bool is_permutation(const std::vector<Eigen::Index>& values, Eigen::Index* duplicate = nullptr,
                    Eigen::Index* out_of_range = nullptr);

/// Folds any number of 64-bit tokens into one RNG stream seed (splitmix64
/// steps). Used to derive independent, reproducible streams per experiment
/// cell.
std::uint64_t mix_seeds(std::initializer_list<std::uint64_t> tokens);

/// Samples s'_i ~ N(i, scale) independently and returns the ordering induced
/// by their ranks: y[i] is the rank of s'_i. Ties (a probability-zero event)
/// break by index. scale = 0 yields the identity. Deterministic given seed.
CameraOrdering perturb_ordering(Eigen::Index n, const PerturbationModel& model);

/// Synthesizes the individual-similarity matrix for a scene: one latent
/// appearance per vehicle (with probability duplicate_prob an exact copy of
/// a uniformly chosen earlier vehicle's latent), Gaussian view noise on the
/// Camera2 observation, and a squared-exponential kernel on the distance.
/// Row i is the Camera1 appearance of vehicle i; column j is the Camera2
/// observation of the vehicle appearing at slot j (placement follows
/// ordering.y). All values lie in (0, 1].
Eigen::MatrixXd synth_similarity(const CameraOrdering& ordering,
                                 const SyntheticAppearanceConfig& config);

/// Ground-truth ordering recovered from external id lists: query_ids[i] is
/// the id at Camera1 position i, gallery_ids[j] the id at Camera2 position
/// j. The id sequences must be duplicate-free and set-equal, and their
/// lengths must match the similarity matrix dimensions.
CameraOrdering ordering_from_ids(const std::vector<std::string>& query_ids,
                                 const std::vector<std::string>& gallery_ids,
                                 const Eigen::MatrixXd& similarities);

}  // namespace flockreid
