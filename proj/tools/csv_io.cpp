#include "csv_io.hpp"

#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

namespace timewarp::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_cell(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

CsvSignal read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("input '" + path + "' is empty");
  CsvSignal out;
  out.columns = split_row(line);
  const std::size_t width = out.columns.size();
  if (width < 2) {
    throw ConfigError("input '" + path + "' needs a time column and at least one value column");
  }

  std::vector<double> times;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != width) {
      throw ConfigError("input '" + path + "' line " + std::to_string(line_no) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(width));
    }
    bool missing = false;
    for (const auto& c : cells) missing = missing || c.empty();
    if (missing) {
      ++out.dropped_rows;
      continue;
    }
    for (std::size_t k = 0; k < width; ++k) {
      double v = 0.0;
      if (!parse_cell(cells[k], v)) {
        throw ConfigError("input '" + path + "' line " + std::to_string(line_no) +
                          ": cannot parse '" + cells[k] + "'");
      }
      (k == 0 ? times : values).push_back(v);
    }
  }

  const auto n = static_cast<Eigen::Index>(times.size());
  const auto d = static_cast<Eigen::Index>(width - 1);
  Eigen::VectorXd t = Eigen::Map<Eigen::VectorXd>(times.data(), n);
  Eigen::MatrixXd v(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) v(i, j) = values[static_cast<std::size_t>(i * d + j)];
  }
  try {
    out.signal = SignalXd::from_samples(t, v);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("input '" + path + "': " + e.what());
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place at '" + path + "'");
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data) {
  std::string text;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) text += ',';
    text += header[k];
  }
  text += '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j) text += ',';
      text += format_double(data(i, j));
    }
    text += '\n';
  }
  write_atomic(path, text);
}

}  // namespace timewarp::cli
