// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.
#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flockreid/assignment.hpp"
#include "flockreid/flock.hpp"
#include "flockreid/io.hpp"
#include "flockreid/metrics.hpp"
#include "flockreid/pipeline.hpp"
#include "flockreid/simulate.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kMasterSeed = 42;

struct Criterion {
  int number;
  std::string name;
  bool passed;
  std::string detail;
  double seconds;
};

std::vector<Criterion> g_results;

template <typename Body>
void run_criterion(int number, const std::string& name, Body&& body) {
  const auto started = Clock::now();
  bool passed = false;
  std::string detail;
  try {
    passed = body(detail);
  } catch (const std::exception& error) {
    passed = false;
    detail = std::string("exception: ") + error.what();
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - started).count();
  g_results.push_back({number, name, passed, detail, seconds});
  std::printf("[%2d] %s %s: %s (%.1f s)\n", number, passed ? "PASS" : "FAIL", name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
}

Eigen::MatrixXd random_unit_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = unit(rng);
  }
  return m;
}

std::string format_double(double value) {
  std::ostringstream out;
  out.precision(4);
  out << value;
  return out.str();
}

// --- criterion 1: Hungarian vs enumeration -------------------------------

bool oracle_equivalence(std::string& detail) {
  const auto started = Clock::now();
  double max_delta = 0.0;
  for (Eigen::Index n = 2; n <= 7; ++n) {
    for (int trial = 0; trial < 1000; ++trial) {
      std::mt19937_64 rng(flockreid::mix_seeds(
          {kMasterSeed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial)}));
      const Eigen::MatrixXd costs = random_unit_matrix(n, rng);
      const double solver = flockreid::solve_min_assignment(costs).objective;
      const double oracle =
          flockreid::brute_force_assignment(costs, flockreid::OptimizeSense::Min).objective;
      max_delta = std::max(max_delta, std::abs(solver - oracle));
    }
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - started).count();
  detail = "1000 matrices per n in {2..7}, max |delta| = " + format_double(max_delta);
  return max_delta <= 1e-12 && seconds < 60.0;
}

// --- criterion 2: flock similarity property suite -------------------------

bool flock_property_suite(std::string& detail) {
  std::mt19937_64 rng(flockreid::mix_seeds({kMasterSeed, 2}));
  std::uniform_int_distribution<Eigen::Index> block_size(1, 7);
  int failures = 0;

  for (int round = 0; round < 500; ++round) {  // range
    const double s = flockreid::flock_similarity(random_unit_matrix(block_size(rng), rng)).similarity;
    failures += !(s >= 0.0 && s <= 1.0);
  }
  for (int round = 0; round < 500; ++round) {  // symmetry
    const Eigen::MatrixXd block = random_unit_matrix(block_size(rng), rng);
    failures += !(std::abs(flockreid::flock_similarity(block).similarity -
                           flockreid::flock_similarity(block.transpose()).similarity) <= 1e-12);
  }
  for (int round = 0; round < 500; ++round) {  // k = 1 degeneration
    std::uniform_int_distribution<Eigen::Index> extent(2, 14);
    const Eigen::Index rows = extent(rng), cols = extent(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd p(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) p(i, j) = unit(rng);
    }
    const Eigen::Index target = std::uniform_int_distribution<Eigen::Index>(0, rows - 1)(rng);
    Eigen::Index argmax = 0;
    p.row(target).maxCoeff(&argmax);
    failures += !(flockreid::match_target(p, target, 1) == argmax);
  }
  for (int round = 0; round < 500; ++round) {  // within-flock permutation invariance
    const Eigen::Index n = block_size(rng);
    const Eigen::MatrixXd block = random_unit_matrix(n, rng);
    std::vector<Eigen::Index> rows(static_cast<size_t>(n)), cols(static_cast<size_t>(n));
    std::iota(rows.begin(), rows.end(), Eigen::Index(0));
    std::iota(cols.begin(), cols.end(), Eigen::Index(0));
    std::shuffle(rows.begin(), rows.end(), rng);
    std::shuffle(cols.begin(), cols.end(), rng);
    Eigen::MatrixXd shuffled(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        shuffled(i, j) = block(rows[static_cast<size_t>(i)], cols[static_cast<size_t>(j)]);
      }
    }
    failures += !(std::abs(flockreid::flock_similarity(block).similarity -
                           flockreid::flock_similarity(shuffled).similarity) <= 1e-12);
  }
  for (int round = 0; round < 500; ++round) {  // ideal identity
    const Eigen::Index n = block_size(rng);
    Eigen::MatrixXd block = random_unit_matrix(n, rng) * 0.99;
    std::vector<Eigen::Index> bijection(static_cast<size_t>(n));
    std::iota(bijection.begin(), bijection.end(), Eigen::Index(0));
    std::shuffle(bijection.begin(), bijection.end(), rng);
    for (Eigen::Index i = 0; i < n; ++i) block(i, bijection[static_cast<size_t>(i)]) = 1.0;
    failures += !(flockreid::flock_similarity(block).similarity == 1.0);
  }

  detail = "5 properties x 500 cases, " + std::to_string(failures) + " failures";
  return failures == 0;
}

// --- criterion 3: displacement variance hand evaluations ------------------

bool variance_exactness(std::string& detail) {
  flockreid::CameraOrdering swap2;
  swap2.y = {1, 0};
  flockreid::CameraOrdering reversal4;
  reversal4.y = {3, 2, 1, 0};
  const bool ok = flockreid::displacement_variance(flockreid::CameraOrdering::identity(9)) == 0.0 &&
                  flockreid::displacement_variance(swap2) == 0.5 &&
                  flockreid::displacement_variance(reversal4) == 2.5;
  detail = "identity -> 0, swap -> 0.5, reversal -> 2.5, all exact";
  return ok;
}

// --- criterion 4: fit consistency -----------------------------------------

bool fit_consistency(std::string& detail) {
  double worst = 0.0;
  for (int i = 3; i <= 20; ++i) {
    const double scale = static_cast<double>(i) / 10.0;
    worst = std::max(
        worst,
        std::abs(flockreid::scale_from_variance(flockreid::variance_from_scale_fit(scale)) - scale));
  }
  const double spot = std::abs(flockreid::variance_from_scale_fit(1.0) - 0.47395);
  detail = "max round-trip error " + format_double(worst) + ", fit(1) off by " +
           format_double(spot);
  return worst <= 0.005 && spot <= 1e-15;
}

// --- criteria 5 and 6: trend reproduction ---------------------------------

double mean_rank1(const flockreid::ExperimentReport& report, Eigen::Index n, Eigen::Index k,
                  double scale) {
  double total = 0.0;
  int count = 0;
  for (const flockreid::ReportRow& row : report.rows) {
    if (row.n == n && row.flock_size == k && row.scale == scale) {
      total += row.rank1;
      ++count;
    }
  }
  return count > 0 ? total / count : -1.0;
}

bool unchanged_position_trend(std::string& detail) {
  const auto started = Clock::now();
  flockreid::ExperimentConfig config;
  config.n_vehicles = {50, 100, 200};
  config.flock_sizes = {1, 3, 5, 7, 9};
  config.scales = {0.0};
  config.trials = 20;
  config.seed = kMasterSeed;
  const flockreid::ExperimentReport report = flockreid::run_sweep(config);

  bool flocks_beat_individuals = true;
  bool individual_non_increasing = true;
  bool best_k_at_least_3 = true;
  std::ostringstream table;
  double previous_k1 = 2.0;
  for (const Eigen::Index n : config.n_vehicles) {
    const double k1 = mean_rank1(report, n, 1, 0.0);
    double best_value = -1.0;
    Eigen::Index best_k = 0;
    for (const Eigen::Index k : config.flock_sizes) {
      const double value = mean_rank1(report, n, k, 0.0);
      if (k > 1 && value <= k1) flocks_beat_individuals = false;
      if (value > best_value) {
        best_value = value;
        best_k = k;
      }
    }
    if (k1 > previous_k1) individual_non_increasing = false;
    previous_k1 = k1;
    if (best_k < 3) best_k_at_least_3 = false;
    table << " n=" << n << ": k1=" << format_double(k1) << " best k=" << best_k << " ("
          << format_double(best_value) << ")";
  }
  const double k1_200 = mean_rank1(report, 200, 1, 0.0);
  const double k5_200 = mean_rank1(report, 200, 5, 0.0);
  const bool doubled = k5_200 >= 2.0 * k1_200;
  const double seconds = std::chrono::duration<double>(Clock::now() - started).count();

  detail = "(a) flocks>individual: " + std::string(flocks_beat_individuals ? "yes" : "NO") +
           ", (b) k1 non-increasing: " + std::string(individual_non_increasing ? "yes" : "NO") +
           ", (c) best k>=3: " + std::string(best_k_at_least_3 ? "yes" : "NO") + ", (d) k5/k1@200=" +
           format_double(k5_200 / k1_200) + ";" + table.str();
  return flocks_beat_individuals && individual_non_increasing && best_k_at_least_3 && doubled &&
         seconds < 300.0;
}

bool perturbation_trend(std::string& detail) {
  const auto started = Clock::now();
  flockreid::ExperimentConfig config;
  config.n_vehicles = {100};
  config.flock_sizes = {1, 3, 5, 7, 9};
  config.scales.clear();
  for (int i = 0; i <= 8; ++i) config.scales.push_back(0.25 * i);
  config.trials = 20;
  config.seed = kMasterSeed;
  const flockreid::ExperimentReport report = flockreid::run_sweep(config);

  double k1_low = 2.0, k1_high = -1.0;
  for (const double scale : config.scales) {
    const double value = mean_rank1(report, 100, 1, scale);
    k1_low = std::min(k1_low, value);
    k1_high = std::max(k1_high, value);
  }
  const bool k1_flat = (k1_high - k1_low) < 0.05;

  bool flocks_degrade = true;
  for (const Eigen::Index k : {3, 5, 7, 9}) {
    if (!(mean_rank1(report, 100, k, 2.0) < mean_rank1(report, 100, k, 0.0))) {
      flocks_degrade = false;
    }
  }
  const double drop3 = mean_rank1(report, 100, 3, 0.0) - mean_rank1(report, 100, 3, 2.0);
  const double drop9 = mean_rank1(report, 100, 9, 0.0) - mean_rank1(report, 100, 9, 2.0);
  const bool larger_flocks_decline_slower = drop9 <= drop3;
  const double seconds = std::chrono::duration<double>(Clock::now() - started).count();

  detail = "(a) k1 spread " + format_double(k1_high - k1_low) + ", (b) flocks degrade: " +
           std::string(flocks_degrade ? "yes" : "NO") + ", (c) drop k9=" + format_double(drop9) +
           " <= drop k3=" + format_double(drop3) +
           (larger_flocks_decline_slower ? "" : " VIOLATED");
  return k1_flat && flocks_degrade && larger_flocks_decline_slower && seconds < 300.0;
}

// --- criterion 7: scale vs variance monotonicity --------------------------

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto ranks = [](const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> rank(values.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<double>(r);
    return rank;
  };
  const std::vector<double> rx = ranks(xs), ry = ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mean = (n - 1.0) / 2.0;
  double cov = 0.0, var = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    cov += (rx[i] - mean) * (ry[i] - mean);
    var += (rx[i] - mean) * (rx[i] - mean);
  }
  return cov / var;
}

bool scale_variance_monotonicity(std::string& detail) {
  std::vector<double> scales, mean_variances;
  for (int i = 1; i <= 8; ++i) {
    const double scale = 0.25 * i;
    double total = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      total += flockreid::displacement_variance(flockreid::perturb_ordering(
          200, {scale, flockreid::mix_seeds({kMasterSeed, 7, static_cast<std::uint64_t>(i),
                                             static_cast<std::uint64_t>(trial)})}));
    }
    scales.push_back(scale);
    mean_variances.push_back(total / 100.0);
  }
  const double rho = spearman(scales, mean_variances);
  detail = "Spearman(scale, mean variance) = " + format_double(rho) + " over 8 scales x 100 trials";
  return rho >= 0.99;
}

// --- criterion 8: heatmap diagonal dominance ------------------------------

bool heatmap_dominance(std::string& detail) {
  bool all_higher = true;
  std::ostringstream values;
  for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto [p, ordering] = flockreid::scenario_unchanged(100, {}, seed);
    const double individual = flockreid::diagonal_dominance(p);
    const double flock = flockreid::diagonal_dominance(flockreid::flock_similarity_grid(p, 5));
    values << " seed " << seed << ": k1=" << format_double(individual)
           << " k5=" << format_double(flock) << ";";
    all_higher = all_higher && flock > individual;
  }
  detail = "k=5 dominance must exceed k=1 on 3 seeds:" + values.str();
  return all_higher;
}

// --- criterion 9: CLI determinism ------------------------------------------

bool cli_determinism(std::string& detail) {
  const fs::path dir =
      fs::temp_directory_path() / ("flockreid_acc_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  const std::string args = " sweep --n-list 40 --flock-sizes 1,3 --scales 0,0.5 --trials 2"
                           " --seed 7 --output ";
  const fs::path first = dir / "a.csv";
  const fs::path second = dir / "b.csv";
  const int rc1 = std::system((std::string(FLOCKREID_CLI_PATH) + args + first.string()).c_str());
  const int rc2 = std::system((std::string(FLOCKREID_CLI_PATH) + args + second.string()).c_str());

  const auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  const std::string a = slurp(first);
  const std::string b = slurp(second);
  fs::remove_all(dir);

  detail = "two identical cmd_sweep runs, " + std::to_string(a.size()) + " bytes each, " +
           (a == b ? "byte-identical" : "DIFFER");
  return rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
}

// --- criterion 10: performance sanity --------------------------------------

bool performance_sanity(std::string& detail, double suite_seconds_so_far) {
  std::mt19937_64 rng(flockreid::mix_seeds({kMasterSeed, 10}));
  const Eigen::MatrixXd costs = random_unit_matrix(500, rng);
  const auto started = Clock::now();
  const flockreid::Assignment result = flockreid::solve_min_assignment(costs);
  const double solve_seconds = std::chrono::duration<double>(Clock::now() - started).count();
  const bool mapping_ok = flockreid::is_permutation(result.mapping);

  detail = "n=500 solve in " + format_double(solve_seconds) + " s, suite so far " +
           format_double(suite_seconds_so_far) + " s";
  return mapping_ok && solve_seconds < 1.0 && suite_seconds_so_far < 15.0 * 60.0;
}

}  // namespace

int main() {
  const auto suite_started = Clock::now();
  std::printf("flockreid acceptance suite\n");

  run_criterion(1, "assignment oracle equivalence", oracle_equivalence);
  run_criterion(2, "flock similarity properties", flock_property_suite);
  run_criterion(3, "displacement variance exactness", variance_exactness);
  run_criterion(4, "scale/variance fit consistency", fit_consistency);
  run_criterion(5, "unchanged-position trend", unchanged_position_trend);
  run_criterion(6, "perturbation trend", perturbation_trend);
  run_criterion(7, "scale vs variance monotonicity", scale_variance_monotonicity);
  run_criterion(8, "heatmap diagonal dominance", heatmap_dominance);
  run_criterion(9, "sweep rerun determinism", cli_determinism);
  run_criterion(10, "performance sanity", [&](std::string& detail) {
    const double so_far = std::chrono::duration<double>(Clock::now() - suite_started).count();
    return performance_sanity(detail, so_far);
  });

  int failures = 0;
  for (const Criterion& criterion : g_results) failures += !criterion.passed;
  const double total = std::chrono::duration<double>(Clock::now() - suite_started).count();
  std::printf("%d/%zu criteria passed in %.1f s\n", static_cast<int>(g_results.size()) - failures,
              g_results.size(), total);
  return failures;
}
