#include "flockreid/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "flockreid/flock.hpp"

namespace flockreid {

namespace detail {

std::uint64_t appearance_seed(std::uint64_t master, Eigen::Index n, int trial) {
  return mix_seeds({master, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial),
                    kAppearanceStream});
}

std::uint64_t perturbation_seed(std::uint64_t master, Eigen::Index n, int trial,
                                std::size_t scale_index) {
  return mix_seeds({master, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial),
                    static_cast<std::uint64_t>(scale_index), kPerturbStream});
}

}  // namespace detail

PredictionVector run_reid(const Eigen::MatrixXd& similarities, Eigen::Index flock_size) {
  if (flock_size > similarities.rows() || flock_size > similarities.cols()) {
    throw std::invalid_argument("run_reid: flock size " + std::to_string(flock_size) +
                                " exceeds the " + std::to_string(similarities.rows()) + "x" +
                                std::to_string(similarities.cols()) + " similarity matrix");
  }
  PredictionVector predictions(static_cast<size_t>(similarities.rows()));
  for (Eigen::Index target = 0; target < similarities.rows(); ++target) {
    predictions[static_cast<size_t>(target)] = match_target(similarities, target, flock_size);
  }
  return predictions;
}

namespace {

void validate(const ExperimentConfig& config) {
  if (config.n_vehicles.empty() || config.flock_sizes.empty() || config.scales.empty()) {
    throw std::invalid_argument("run_sweep: n_vehicles, flock_sizes and scales must be non-empty");
  }
  if (config.trials < 1) {
    throw std::invalid_argument("run_sweep: trials must be >= 1");
  }
  const Eigen::Index min_n = *std::min_element(config.n_vehicles.begin(), config.n_vehicles.end());
  for (const Eigen::Index n : config.n_vehicles) {
    if (n < 1) throw std::invalid_argument("run_sweep: list length must be >= 1");
  }
  for (const Eigen::Index k : config.flock_sizes) {
    if (k < 1 || k % 2 == 0 || k > min_n) {
      throw std::invalid_argument("run_sweep: flock size " + std::to_string(k) +
                                  " must be odd and within [1, min list length " +
                                  std::to_string(min_n) + "]");
    }
  }
  for (const double scale : config.scales) {
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
      throw std::invalid_argument("run_sweep: scales must be finite and >= 0");
    }
  }
}

struct Cell {
  std::size_t n_index;
  std::size_t scale_index;
  int trial;
};

}  // namespace

ExperimentReport run_sweep(const ExperimentConfig& config) {
  validate(config);

  // Grids are normalized ascending so row order is lexicographic by value.
  ExperimentConfig cfg = config;
  std::sort(cfg.n_vehicles.begin(), cfg.n_vehicles.end());
  cfg.n_vehicles.erase(std::unique(cfg.n_vehicles.begin(), cfg.n_vehicles.end()),
                       cfg.n_vehicles.end());
  std::sort(cfg.flock_sizes.begin(), cfg.flock_sizes.end());
  cfg.flock_sizes.erase(std::unique(cfg.flock_sizes.begin(), cfg.flock_sizes.end()),
                        cfg.flock_sizes.end());
  std::sort(cfg.scales.begin(), cfg.scales.end());
  cfg.scales.erase(std::unique(cfg.scales.begin(), cfg.scales.end()), cfg.scales.end());

  std::vector<Cell> cells;
  cells.reserve(cfg.n_vehicles.size() * cfg.scales.size() * static_cast<size_t>(cfg.trials));
  for (std::size_t ni = 0; ni < cfg.n_vehicles.size(); ++ni) {
    for (std::size_t si = 0; si < cfg.scales.size(); ++si) {
      for (int trial = 0; trial < cfg.trials; ++trial) cells.push_back({ni, si, trial});
    }
  }

  const std::size_t k_count = cfg.flock_sizes.size();
  ExperimentReport report;
  report.rows.resize(cells.size() * k_count);

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::size_t failed_cell = cells.size();
  std::string failure_message;

  const auto run_cell = [&](std::size_t cell_index) {
    const Cell& cell = cells[cell_index];
    const Eigen::Index n = cfg.n_vehicles[cell.n_index];
    const double scale = cfg.scales[cell.scale_index];

    const CameraOrdering ordering = perturb_ordering(
        n, PerturbationModel{scale, detail::perturbation_seed(cfg.seed, n, cell.trial,
                                                              cell.scale_index)});
    SyntheticAppearanceConfig appearance = cfg.appearance;
    appearance.seed = detail::appearance_seed(cfg.seed, n, cell.trial);
    const Eigen::MatrixXd similarities = synth_similarity(ordering, appearance);

    const double variance = displacement_variance(ordering);
    const double recovered = scale_from_variance(variance);

    for (std::size_t ki = 0; ki < k_count; ++ki) {
      const auto started = std::chrono::steady_clock::now();
      const PredictionVector predictions = run_reid(similarities, cfg.flock_sizes[ki]);
      const std::chrono::duration<double, std::milli> elapsed =
          std::chrono::steady_clock::now() - started;

      ReportRow& row = report.rows[cell_index * k_count + ki];
      row.n = n;
      row.flock_size = cfg.flock_sizes[ki];
      row.scale = scale;
      row.trial = cell.trial;
      row.rank1 = rank1_accuracy(ordering, predictions);
      row.variance = variance;
      row.recovered_scale = recovered;
      row.wall_ms = elapsed.count();
    }
  };

  const auto worker = [&] {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= cells.size()) return;
      try {
        run_cell(index);
      } catch (const std::exception& error) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (index < failed_cell) {
          failed_cell = index;
          failure_message = error.what();
        }
      }
    }
  };

  std::size_t thread_count = cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads)
                                             : std::thread::hardware_concurrency();
  thread_count = std::clamp<std::size_t>(thread_count, 1, std::max<std::size_t>(cells.size(), 1));
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  if (failed_cell < cells.size()) {
    const Cell& cell = cells[failed_cell];
    std::ostringstream what;
    what << "run_sweep: cell (n=" << cfg.n_vehicles[cell.n_index]
         << ", scale=" << cfg.scales[cell.scale_index] << ", trial=" << cell.trial
         << ") failed: " << failure_message;
    throw std::runtime_error(what.str());
  }

  // Cells are laid out (n, scale, trial); rows must read (n, scale, k, trial).
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     if (a.n != b.n) return a.n < b.n;
                     if (a.scale != b.scale) return a.scale < b.scale;
                     if (a.flock_size != b.flock_size) return a.flock_size < b.flock_size;
                     return a.trial < b.trial;
                   });
  return report;
}

std::pair<Eigen::MatrixXd, CameraOrdering> scenario_unchanged(
    Eigen::Index n, const SyntheticAppearanceConfig& appearance, std::uint64_t seed) {
  CameraOrdering ordering = CameraOrdering::identity(n);
  SyntheticAppearanceConfig config = appearance;
  config.seed = seed;
  Eigen::MatrixXd similarities = synth_similarity(ordering, config);
  return {std::move(similarities), std::move(ordering)};
}

}  // namespace flockreid
