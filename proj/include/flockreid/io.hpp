// File formats: similarity-matrix CSV, ordering/prediction lists, sweep
// report CSV, and ASCII PGM heatmaps. All writers are atomic (temp file +
// rename) and emit UTF-8 with LF line endings; reals are serialized with
// 6 significant digits.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "flockreid/pipeline.hpp"
#include "flockreid/simulate.hpp"

namespace flockreid {

/// Parse or validation failure in an input file. line/column are 1-based;
/// column counts fields, not bytes. Zero means "not applicable".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::filesystem::path file, std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(format(file, line, column, what)),
        file_(std::move(file)),
        line_(line),
        column_(column) {}

  const std::filesystem::path& file() const { return file_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::filesystem::path& file, std::size_t line, std::size_t column,
                            const std::string& what);

  std::filesystem::path file_;
  std::size_t line_;
  std::size_t column_;
};

/// Plain CSV of reals in [0,1], row i = query i, column j = gallery j, no
/// header; lines starting with '#' are comments.
Eigen::MatrixXd read_similarity_matrix(const std::filesystem::path& path);
void write_similarity_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);

/// One integer per line: the Camera2 appearance order of the vehicle at
/// each Camera1 position. Must form a permutation of {0,...,N-1}.
CameraOrdering read_ordering(const std::filesystem::path& path);
void write_ordering(const std::filesystem::path& path, const CameraOrdering& ordering);

/// One "query_index,gallery_index" line per query.
void write_predictions(const std::filesystem::path& path, const PredictionVector& predictions);

/// Order scatter: "x,y" rows followed by a trailing comment line carrying
/// the displacement variance and the recovered perturbation scale.
void write_scatter(const std::filesystem::path& path, const CameraOrdering& ordering);

/// Sweep report CSV, header "n,flock_size,scale,trial,rank1,variance,
/// recovered_scale,wall_ms". Timings are nondeterministic, so wall_ms is
/// written as 0 unless include_timings is set; everything else is
/// byte-stable for a fixed (config, seed).
void write_sweep_csv(const std::filesystem::path& path, const ExperimentReport& report,
                     bool include_timings = false);

/// ASCII PGM (P2, maxval 255) with pixel = round(255 * (1 - value)):
/// darker pixels mean higher similarity.
void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& values);

/// Inverse of write_pgm up to the 8-bit quantization: value = 1 - pixel/maxval.
Eigen::MatrixXd read_pgm(const std::filesystem::path& path);

/// Writes `contents` to `path` atomically via a sibling temp file + rename.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

}  // namespace flockreid
