#pragma once

#include "timewarp/signal.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace timewarp::cli {

/// A signal read from CSV plus its column names (first is the time column).
struct CsvSignal {
  SignalXd signal;
  std::vector<std::string> columns;
  std::size_t dropped_rows = 0;
};

/**
 * Read one signal: header row, first column `t`, the rest are dimensions.
 * Rows with any empty cell are dropped. Throws ConfigError on malformed input.
 */
CsvSignal read_signal_csv(const std::string& path);

/// Write `header` and the rows of `data` as CSV, atomically.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& data);

/// Write `text` to `path` via a temporary sibling and rename.
void write_atomic(const std::string& path, const std::string& text);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace timewarp::cli
