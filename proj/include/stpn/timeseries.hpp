#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "stpn/errors.hpp"

namespace stpn {

/// A block of f synchronized real-valued channels, T samples long.
/// Channel order is canonical: it fixes the (a, b) indexing used by every
/// downstream pattern matrix.
struct TimeSeriesFrame {
  std::vector<std::string> channels;
  Eigen::MatrixXd data;  // T x f
  std::optional<double> sample_period;

  long samples() const { return data.rows(); }
  int channel_count() const { return static_cast<int>(data.cols()); }

  /// Index of a named channel; throws ValidationError when absent.
  int channel_index(const std::string& name) const;
};

struct WindowSpec {
  int window_length = 200;
  int stride = 100;
};

struct LoadResult {
  TimeSeriesFrame frame;
  long dropped_rows = 0;  // rows removed because they held non-finite values
};

/// Parse a CSV file (header row of channel names, one sample per row).
/// Rows containing non-finite values (nan/inf) are dropped whole and counted;
/// cells that do not parse as numbers at all are an error. When `schema` is
/// given, columns are selected and reordered to match it.
LoadResult load_csv(const std::string& path,
                    const std::optional<std::vector<std::string>>& schema = std::nullopt);

/// Write a frame in the same CSV dialect load_csv reads.
void write_csv(const TimeSeriesFrame& frame, const std::string& path);

/// Slice a frame into floor((T - L) / stride) + 1 windows of length L.
std::vector<TimeSeriesFrame> windows(const TimeSeriesFrame& frame, const WindowSpec& spec);

/// Number of windows the spec yields on a frame of length T.
long window_count(long samples, const WindowSpec& spec);

/// Start sample of window w under the spec.
inline long window_start(long w, const WindowSpec& spec) { return w * spec.stride; }

/// Row-wise concatenation; all frames must share the channel list.
TimeSeriesFrame concat(const std::vector<TimeSeriesFrame>& frames);

}  // namespace stpn
