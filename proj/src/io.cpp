#include "flockreid/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

namespace flockreid {

namespace {

std::string trimmed(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

bool is_comment_or_blank(const std::string& line) {
  const std::string t = trimmed(line);
  return t.empty() || t.front() == '#';
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type from = 0;
  for (;;) {
    const auto comma = line.find(',', from);
    if (comma == std::string::npos) {
      fields.push_back(trimmed(line.substr(from)));
      return fields;
    }
    fields.push_back(trimmed(line.substr(from, comma - from)));
    from = comma + 1;
  }
}

double parse_real(const std::filesystem::path& path, std::size_t line, std::size_t column,
                  const std::string& field) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError(path, line, column, "'" + field + "' is not a number");
  }
  return value;
}

long long parse_integer(const std::filesystem::path& path, std::size_t line, std::size_t column,
                        const std::string& field) {
  long long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError(path, line, column, "'" + field + "' is not an integer");
  }
  return value;
}

std::string format_real(double value) {
  std::ostringstream out;
  out.precision(6);
  out << value;
  return out.str();
}

std::ifstream open_for_reading(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path, 0, 0, "cannot open file for reading");
  }
  return in;
}

}  // namespace

std::string ParseError::format(const std::filesystem::path& file, std::size_t line,
                               std::size_t column, const std::string& what) {
  std::ostringstream out;
  out << file.string();
  if (line > 0) {
    out << ":" << line;
    if (column > 0) out << ":" << column;
  }
  out << ": " << what;
  return out.str();
}

Eigen::MatrixXd read_similarity_matrix(const std::filesystem::path& path) {
  std::ifstream in = open_for_reading(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_comment_or_blank(line)) continue;
    const std::vector<std::string> fields = split_fields(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const double value = parse_real(path, line_number, c + 1, fields[c]);
      if (!std::isfinite(value)) {
        throw ParseError(path, line_number, c + 1, "value '" + fields[c] + "' is not finite");
      }
      if (value < 0.0 || value > 1.0) {
        throw ParseError(path, line_number, c + 1,
                         "value " + fields[c] + " out of range [0,1]");
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path, line_number, 0,
                       "row has " + std::to_string(row.size()) + " fields, expected " +
                           std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError(path, 0, 0, "no data rows");
  }

  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      matrix(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }
  return matrix;
}

void write_similarity_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& matrix) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(matrix(i, j));
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

CameraOrdering read_ordering(const std::filesystem::path& path) {
  std::ifstream in = open_for_reading(path);
  CameraOrdering ordering;
  std::vector<std::size_t> line_of_value;  // for naming the duplicate's location
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_comment_or_blank(line)) continue;
    const long long value = parse_integer(path, line_number, 1, trimmed(line));
    ordering.y.push_back(static_cast<Eigen::Index>(value));
    line_of_value.push_back(line_number);
  }
  if (ordering.y.empty()) {
    throw ParseError(path, 0, 0, "no data rows");
  }

  Eigen::Index duplicate = -1, stray = -1;
  if (!is_permutation(ordering.y, &duplicate, &stray)) {
    if (duplicate >= 0) {
      throw ParseError(path, 0, 0,
                       "not a permutation of 0..n-1: value " + std::to_string(duplicate) +
                           " appears more than once");
    }
    throw ParseError(path, 0, 0,
                     "not a permutation of 0..n-1: value " + std::to_string(stray) +
                         " out of range [0, " + std::to_string(ordering.size()) + ")");
  }
  return ordering;
}

void write_ordering(const std::filesystem::path& path, const CameraOrdering& ordering) {
  std::ostringstream out;
  for (const Eigen::Index value : ordering.y) out << value << '\n';
  atomic_write(path, out.str());
}

void write_predictions(const std::filesystem::path& path, const PredictionVector& predictions) {
  std::ostringstream out;
  for (std::size_t i = 0; i < predictions.size(); ++i) out << i << ',' << predictions[i] << '\n';
  atomic_write(path, out.str());
}

void write_scatter(const std::filesystem::path& path, const CameraOrdering& ordering) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < ordering.size(); ++i) {
    out << i << ',' << ordering.y[static_cast<size_t>(i)] << '\n';
  }
  const double variance = displacement_variance(ordering);
  out << "# variance=" << format_real(variance)
      << " recovered_scale=" << format_real(scale_from_variance(variance)) << '\n';
  atomic_write(path, out.str());
}

void write_sweep_csv(const std::filesystem::path& path, const ExperimentReport& report,
                     bool include_timings) {
  std::ostringstream out;
  out << "n,flock_size,scale,trial,rank1,variance,recovered_scale,wall_ms\n";
  for (const ReportRow& row : report.rows) {
    out << row.n << ',' << row.flock_size << ',' << format_real(row.scale) << ',' << row.trial
        << ',' << format_real(row.rank1) << ',' << format_real(row.variance) << ','
        << format_real(row.recovered_scale) << ','
        << (include_timings ? format_real(row.wall_ms) : "0") << '\n';
  }
  atomic_write(path, out.str());
}

void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& values) {
  std::ostringstream out;
  out << "P2\n" << values.cols() << ' ' << values.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ' ';
      out << std::lround(255.0 * (1.0 - values(i, j)));
    }
    out << '\n';
  }
  atomic_write(path, out.str());
}

namespace {

// Token reader honoring PGM '#' comments.
std::string next_pgm_token(std::istream& in) {
  std::string token;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

}  // namespace

Eigen::MatrixXd read_pgm(const std::filesystem::path& path) {
  std::ifstream in = open_for_reading(path);
  if (next_pgm_token(in) != "P2") {
    throw ParseError(path, 1, 1, "expected ASCII PGM magic 'P2'");
  }
  const auto read_int = [&](const char* what) {
    const std::string token = next_pgm_token(in);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || value < 0) {
      throw ParseError(path, 0, 0, std::string("bad PGM ") + what + " '" + token + "'");
    }
    return value;
  };
  const long long width = read_int("width");
  const long long height = read_int("height");
  const long long maxval = read_int("maxval");
  if (width < 1 || height < 1 || maxval < 1) {
    throw ParseError(path, 0, 0, "degenerate PGM dimensions");
  }

  Eigen::MatrixXd values(height, width);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const long long pixel = read_int("pixel");
      if (pixel > maxval) {
        throw ParseError(path, 0, 0, "pixel " + std::to_string(pixel) + " exceeds maxval");
      }
      values(i, j) = 1.0 - static_cast<double>(pixel) / static_cast<double>(maxval);
    }
  }
  return values;
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path directory =
      path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::random_device entropy;
  const std::filesystem::path temp =
      directory / (path.filename().string() + ".tmp" + std::to_string(entropy()));
  {
    std::ofstream out(temp, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot open '" + temp.string() + "' for writing");
    }
    out << contents;
    out.flush();
    if (!out) {
      std::filesystem::remove(temp);
      throw std::runtime_error("failed writing '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp);
    throw std::runtime_error("failed to move '" + temp.string() + "' to '" + path.string() +
                             "': " + ec.message());
  }
}

}  // namespace flockreid
