#include "flockreid/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>
#include <utility>

namespace flockreid {

bool is_permutation(const std::vector<Eigen::Index>& values, Eigen::Index* duplicate,
                    Eigen::Index* out_of_range) {
  const Eigen::Index n = static_cast<Eigen::Index>(values.size());
  std::vector<char> seen(values.size(), 0);
  for (const Eigen::Index v : values) {
    if (v < 0 || v >= n) {
      if (out_of_range) *out_of_range = v;
      return false;
    }
    if (seen[static_cast<size_t>(v)]) {
      if (duplicate) *duplicate = v;
      return false;
    }
    seen[static_cast<size_t>(v)] = 1;
  }
  return true;
}

std::uint64_t mix_seeds(std::initializer_list<std::uint64_t> tokens) {
  // splitmix64 finalizer, folded once per token
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  for (std::uint64_t token : tokens) {
    state += token + 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    state = z ^ (z >> 31);
  }
  return state;
}

CameraOrdering perturb_ordering(Eigen::Index n, const PerturbationModel& model) {
  if (n < 1) {
    throw std::invalid_argument("perturb_ordering: need at least one vehicle, got " +
                                std::to_string(n));
  }
  if (!(model.scale >= 0.0) || !std::isfinite(model.scale)) {
    throw std::invalid_argument("perturb_ordering: scale must be finite and >= 0");
  }

  std::mt19937_64 rng(model.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::vector<double> samples(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    samples[static_cast<size_t>(i)] = static_cast<double>(i) + model.scale * unit_normal(rng);
  }

  std::vector<Eigen::Index> by_rank(static_cast<size_t>(n));
  std::iota(by_rank.begin(), by_rank.end(), Eigen::Index(0));
  std::stable_sort(by_rank.begin(), by_rank.end(), [&](Eigen::Index a, Eigen::Index b) {
    return samples[static_cast<size_t>(a)] < samples[static_cast<size_t>(b)];
  });

  CameraOrdering ordering;
  ordering.y.resize(static_cast<size_t>(n));
  for (Eigen::Index rank = 0; rank < n; ++rank) {
    ordering.y[static_cast<size_t>(by_rank[static_cast<size_t>(rank)])] = rank;
  }
  return ordering;
}

Eigen::MatrixXd synth_similarity(const CameraOrdering& ordering,
                                 const SyntheticAppearanceConfig& config) {
  if (config.latent_dim < 1) {
    throw std::invalid_argument("synth_similarity: latent_dim must be >= 1");
  }
  if (!(config.duplicate_prob >= 0.0 && config.duplicate_prob <= 1.0)) {
    throw std::invalid_argument("synth_similarity: duplicate_prob must lie in [0,1]");
  }
  if (!(config.view_noise >= 0.0) || !std::isfinite(config.view_noise)) {
    throw std::invalid_argument("synth_similarity: view_noise must be finite and >= 0");
  }
  if (!(config.kernel_width > 0.0) || !std::isfinite(config.kernel_width)) {
    throw std::invalid_argument("synth_similarity: kernel_width must be finite and > 0");
  }
  const Eigen::Index n = ordering.size();
  if (n < 1) {
    throw std::invalid_argument("synth_similarity: ordering is empty");
  }
  Eigen::Index duplicate = -1, stray = -1;
  if (!is_permutation(ordering.y, &duplicate, &stray)) {
    throw std::invalid_argument("synth_similarity: ordering.y is not a permutation");
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit_uniform(0.0, 1.0);

  const Eigen::Index d = config.latent_dim;
  Eigen::MatrixXd latents(d, n);
  for (Eigen::Index v = 0; v < n; ++v) {
    if (v > 0 && unit_uniform(rng) < config.duplicate_prob) {
      std::uniform_int_distribution<Eigen::Index> earlier(0, v - 1);
      latents.col(v) = latents.col(earlier(rng));
    } else {
      for (Eigen::Index c = 0; c < d; ++c) latents(c, v) = unit_normal(rng);
    }
  }
  Eigen::MatrixXd observed = latents;
  for (Eigen::Index v = 0; v < n; ++v) {
    for (Eigen::Index c = 0; c < d; ++c) observed(c, v) += config.view_noise * unit_normal(rng);
  }

  // slot_vehicle[j] = vehicle occupying Camera2 slot j
  std::vector<Eigen::Index> slot_vehicle(static_cast<size_t>(n));
  for (Eigen::Index v = 0; v < n; ++v) slot_vehicle[static_cast<size_t>(ordering.y[static_cast<size_t>(v)])] = v;

  const double inv_two_tau_sq = 1.0 / (2.0 * config.kernel_width * config.kernel_width);
  Eigen::MatrixXd similarities(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto obs = observed.col(slot_vehicle[static_cast<size_t>(j)]);
    for (Eigen::Index i = 0; i < n; ++i) {
      similarities(i, j) = std::exp(-(latents.col(i) - obs).squaredNorm() * inv_two_tau_sq);
    }
  }
  return similarities;
}

CameraOrdering ordering_from_ids(const std::vector<std::string>& query_ids,
                                 const std::vector<std::string>& gallery_ids,
                                 const Eigen::MatrixXd& similarities) {
  if (query_ids.size() != gallery_ids.size()) {
    throw std::invalid_argument("ordering_from_ids: " + std::to_string(query_ids.size()) +
                                " query ids vs " + std::to_string(gallery_ids.size()) +
                                " gallery ids");
  }
  if (std::cmp_not_equal(query_ids.size(), similarities.rows()) ||
      std::cmp_not_equal(gallery_ids.size(), similarities.cols())) {
    throw std::invalid_argument(
        "ordering_from_ids: id list lengths do not match the similarity matrix (" +
        std::to_string(similarities.rows()) + "x" + std::to_string(similarities.cols()) + ")");
  }

  std::unordered_map<std::string, Eigen::Index> gallery_slot;
  gallery_slot.reserve(gallery_ids.size());
  for (size_t j = 0; j < gallery_ids.size(); ++j) {
    if (!gallery_slot.emplace(gallery_ids[j], static_cast<Eigen::Index>(j)).second) {
      throw std::invalid_argument("ordering_from_ids: duplicate gallery id '" + gallery_ids[j] + "'");
    }
  }

  CameraOrdering ordering;
  ordering.y.resize(query_ids.size());
  std::vector<char> used(gallery_ids.size(), 0);
  for (size_t i = 0; i < query_ids.size(); ++i) {
    const auto it = gallery_slot.find(query_ids[i]);
    if (it == gallery_slot.end()) {
      throw std::invalid_argument("ordering_from_ids: query id '" + query_ids[i] +
                                  "' missing from the gallery");
    }
    if (used[static_cast<size_t>(it->second)]) {
      throw std::invalid_argument("ordering_from_ids: duplicate query id '" + query_ids[i] + "'");
    }
    used[static_cast<size_t>(it->second)] = 1;
    ordering.y[i] = it->second;
  }
  return ordering;
}

}  // namespace flockreid
