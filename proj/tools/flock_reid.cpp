// Command-line front end: file-based re-identification, seeded experiment
// sweeps, heatmap and scatter emission, and the solver-vs-oracle check.
//
// Exit codes: 0 success, 1 verification mismatch (oracle), 2 usage or
// validation failure.
#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flockreid/assignment.hpp"
#include "flockreid/flock.hpp"
#include "flockreid/io.hpp"
#include "flockreid/metrics.hpp"
#include "flockreid/pipeline.hpp"
#include "flockreid/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
T parse_number(const std::string& token, const char* what) {
  T value{};
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw UsageError(std::string("cannot parse ") + what + " '" + token + "'");
  }
  return value;
}

std::vector<std::string> split_on_commas(const std::string& list) {
  std::vector<std::string> tokens;
  std::string::size_type from = 0;
  for (;;) {
    const auto comma = list.find(',', from);
    if (comma == std::string::npos) {
      tokens.push_back(list.substr(from));
      return tokens;
    }
    tokens.push_back(list.substr(from, comma - from));
    from = comma + 1;
  }
}

std::vector<Eigen::Index> parse_index_list(const std::string& list, const char* what) {
  std::vector<Eigen::Index> values;
  for (const std::string& token : split_on_commas(list)) {
    values.push_back(parse_number<Eigen::Index>(token, what));
  }
  return values;
}

// Scale grids accept plain values and "start..end:step" ranges, inclusive
// of both ends when the step divides the range.
std::vector<double> parse_scale_grid(const std::string& list) {
  std::vector<double> scales;
  for (const std::string& token : split_on_commas(list)) {
    const auto dots = token.find("..");
    if (dots == std::string::npos) {
      scales.push_back(parse_number<double>(token, "scale"));
      continue;
    }
    const auto colon = token.find(':', dots + 2);
    if (colon == std::string::npos) {
      throw UsageError("scale range '" + token + "' must look like start..end:step");
    }
    const double start = parse_number<double>(token.substr(0, dots), "scale range start");
    const double end = parse_number<double>(token.substr(dots + 2, colon - dots - 2), "scale range end");
    const double step = parse_number<double>(token.substr(colon + 1), "scale range step");
    if (!(step > 0.0) || end < start) {
      throw UsageError("scale range '" + token + "' needs end >= start and step > 0");
    }
    const double span = end - start;
    const auto whole_steps = static_cast<long long>(std::llround(span / step));
    const bool divides = std::abs(start + static_cast<double>(whole_steps) * step - end) <= 1e-9;
    const long long count =
        divides ? whole_steps + 1 : static_cast<long long>(std::floor(span / step + 1e-9)) + 1;
    for (long long i = 0; i < count; ++i) scales.push_back(start + static_cast<double>(i) * step);
  }
  return scales;
}

flockreid::SyntheticAppearanceConfig load_appearance_config(const std::string& path) {
  flockreid::SyntheticAppearanceConfig config;
  if (path.empty()) return config;

  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& error) {
    throw UsageError("config file '" + path + "': " + error.what());
  }
  if (!parsed.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");

  for (const auto& [key, value] : parsed.items()) {
    try {
      if (key == "latent_dim") {
        config.latent_dim = value.get<Eigen::Index>();
      } else if (key == "duplicate_prob") {
        config.duplicate_prob = value.get<double>();
      } else if (key == "view_noise") {
        config.view_noise = value.get<double>();
      } else if (key == "kernel_width") {
        config.kernel_width = value.get<double>();
      } else {
        throw UsageError("config file '" + path + "': unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& error) {
      throw UsageError("config file '" + path + "': key '" + key + "': " + error.what());
    }
  }
  return config;
}

int threads_from_environment() {
  const char* raw = std::getenv("FLOCK_REID_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  const int value = parse_number<int>(raw, "FLOCK_REID_THREADS");
  if (value < 0) throw UsageError("FLOCK_REID_THREADS must be >= 0");
  return value;
}

struct ReidOptions {
  std::string similarity_path;
  int flock_size = 1;
  std::string truth_path;
  std::string output_path;
};

int cmd_reid(const ReidOptions& options) {
  const Eigen::MatrixXd similarities = flockreid::read_similarity_matrix(options.similarity_path);
  const flockreid::PredictionVector predictions =
      flockreid::run_reid(similarities, options.flock_size);

  if (options.output_path.empty()) {
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      std::cout << i << ',' << predictions[i] << '\n';
    }
  } else {
    flockreid::write_predictions(options.output_path, predictions);
  }

  if (!options.truth_path.empty()) {
    const flockreid::CameraOrdering truth = flockreid::read_ordering(options.truth_path);
    const double accuracy = flockreid::rank1_accuracy(truth, predictions);
    std::cout << "rank1=" << std::fixed << std::setprecision(4) << accuracy << '\n';
  }
  return kExitOk;
}

struct SweepOptions {
  std::string n_list = "50,100,200";
  std::string flock_sizes = "1,3,5,7,9";
  std::string scales = "0";
  int trials = 20;
  std::uint64_t seed = 0;
  std::string config_path;
  std::string output_path;
  bool timings = false;
};

int cmd_sweep(const SweepOptions& options) {
  flockreid::ExperimentConfig config;
  config.n_vehicles = parse_index_list(options.n_list, "list length");
  config.flock_sizes = parse_index_list(options.flock_sizes, "flock size");
  config.scales = parse_scale_grid(options.scales);
  config.trials = options.trials;
  config.appearance = load_appearance_config(options.config_path);
  config.seed = options.seed;
  config.threads = threads_from_environment();

  const flockreid::ExperimentReport report = flockreid::run_sweep(config);
  flockreid::write_sweep_csv(options.output_path, report, options.timings);
  return kExitOk;
}

struct HeatmapOptions {
  std::string similarity_path;
  int flock_size = 1;
  std::string output_path;
};

int cmd_heatmap(const HeatmapOptions& options) {
  const Eigen::MatrixXd similarities = flockreid::read_similarity_matrix(options.similarity_path);
  const Eigen::MatrixXd grid = flockreid::flock_similarity_grid(similarities, options.flock_size);
  flockreid::write_pgm(options.output_path, grid);
  return kExitOk;
}

struct ScatterOptions {
  std::string ordering_path;
  std::string output_path;
};

int cmd_scatter(const ScatterOptions& options) {
  const flockreid::CameraOrdering ordering = flockreid::read_ordering(options.ordering_path);
  flockreid::write_scatter(options.output_path, ordering);
  return kExitOk;
}

struct OracleOptions {
  int max_n = 7;
  int trials = 1000;
  std::uint64_t seed = 0;
};

int cmd_oracle(const OracleOptions& options) {
  if (options.max_n < 1 || options.max_n > flockreid::kOracleOrderCap) {
    throw UsageError("--max-n must lie in [1, " + std::to_string(flockreid::kOracleOrderCap) + "]");
  }
  if (options.trials < 1) throw UsageError("--trials must be >= 1");

  constexpr double kTolerance = 1e-12;
  bool all_passed = true;
  for (int n = 1; n <= options.max_n; ++n) {
    double max_delta = 0.0;
    bool size_passed = true;
    for (int trial = 0; trial < options.trials; ++trial) {
      std::mt19937_64 rng(flockreid::mix_seeds(
          {options.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial)}));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      Eigen::MatrixXd matrix(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) matrix(i, j) = unit(rng);
      }
      const flockreid::Assignment solved = flockreid::solve_min_assignment(matrix);
      const flockreid::Assignment oracle =
          flockreid::brute_force_assignment(matrix, flockreid::OptimizeSense::Min);
      const double delta = std::abs(solved.objective - oracle.objective);
      max_delta = std::max(max_delta, delta);
      if (delta > kTolerance || !flockreid::is_permutation(solved.mapping)) {
        size_passed = false;
      }
    }
    std::cout << "n=" << n << ": " << (size_passed ? "PASS" : "FAIL") << " (trials="
              << options.trials << ", max|delta|=" << max_delta << ")\n";
    all_passed = all_passed && size_passed;
  }
  return all_passed ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flock-similarity vehicle re-identification over ordered camera galleries"};
  app.require_subcommand(1);

  ReidOptions reid;
  CLI::App* reid_cmd = app.add_subcommand("reid", "Match every query against the gallery");
  reid_cmd->add_option("--similarity", reid.similarity_path, "Similarity matrix CSV")->required();
  reid_cmd->add_option("--flock-size", reid.flock_size, "Flock size (odd)")->required();
  reid_cmd->add_option("--truth", reid.truth_path, "Ground-truth ordering file for scoring");
  reid_cmd->add_option("--output", reid.output_path, "Prediction file (default: stdout)");

  SweepOptions sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a seeded experiment grid");
  sweep_cmd->add_option("--n-list", sweep.n_list, "List lengths, comma separated");
  sweep_cmd->add_option("--flock-sizes", sweep.flock_sizes, "Flock sizes, comma separated (odd)");
  sweep_cmd->add_option("--scales", sweep.scales,
                        "Perturbation scales: values and start..end:step ranges");
  sweep_cmd->add_option("--trials", sweep.trials, "Trials per (n, scale) cell");
  sweep_cmd->add_option("--seed", sweep.seed, "Master seed");
  sweep_cmd->add_option("--config", sweep.config_path, "Appearance calibration JSON");
  sweep_cmd->add_option("--output", sweep.output_path, "Report CSV path")->required();
  sweep_cmd->add_flag("--timings", sweep.timings,
                      "Emit measured wall_ms (breaks byte-for-byte rerun identity)");

  HeatmapOptions heatmap;
  CLI::App* heatmap_cmd = app.add_subcommand("heatmap", "Emit a flock-similarity grid as ASCII PGM");
  heatmap_cmd->add_option("--similarity", heatmap.similarity_path, "Similarity matrix CSV")->required();
  heatmap_cmd->add_option("--flock-size", heatmap.flock_size, "Flock size (odd)")->required();
  heatmap_cmd->add_option("--output", heatmap.output_path, "PGM path")->required();

  ScatterOptions scatter;
  CLI::App* scatter_cmd = app.add_subcommand("scatter", "Emit the order scatter of an ordering file");
  scatter_cmd->add_option("--ordering", scatter.ordering_path, "Ordering file")->required();
  scatter_cmd->add_option("--output", scatter.output_path, "Scatter CSV path")->required();

  OracleOptions oracle;
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "Cross-check the assignment solver against enumeration");
  oracle_cmd->add_option("--max-n", oracle.max_n, "Largest matrix order to check (<= 9)");
  oracle_cmd->add_option("--trials", oracle.trials, "Random matrices per order");
  oracle_cmd->add_option("--seed", oracle.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return kExitUsage;
  }

  try {
    if (*reid_cmd) return cmd_reid(reid);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*heatmap_cmd) return cmd_heatmap(heatmap);
    if (*scatter_cmd) return cmd_scatter(scatter);
    if (*oracle_cmd) return cmd_oracle(oracle);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
