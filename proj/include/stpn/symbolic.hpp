#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "stpn/timeseries.hpp"

namespace stpn {

/// Uniform partitioning of each channel's training range into
/// alphabet_size equal-width cells. Immutable once fitted.
struct Partitioner {
  struct Channel {
    double lo = 0.0;
    double hi = 0.0;
    int alphabet_size = 0;
  };
  std::vector<Channel> channels;

  int channel_count() const { return static_cast<int>(channels.size()); }

  /// Cell edges of one channel: alphabet_size - 1 strictly increasing values
  /// inside (lo, hi).
  std::vector<double> edges(int channel) const;

  /// Map one value to its symbol. Cells are left-closed (a value on an edge
  /// belongs to the upper cell); out-of-range values clamp to the boundary
  /// symbols.
  int symbol(int channel, double value) const;
};

/// Per-channel symbol sequences over {0, ..., alphabet_size-1}.
struct SymbolFrame {
  Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic> symbols;  // T x f
  std::vector<int> alphabet_sizes;

  long length() const { return symbols.rows(); }
  int channel_count() const { return static_cast<int>(symbols.cols()); }
};

/// Per-channel state sequences of a depth-D Markov machine. The state at
/// index k encodes the D symbols ending at original index k + depth - 1,
/// most recent symbol in the lowest digit.
struct StateFrame {
  Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic> states;  // (T-D+1) x f
  int depth = 1;
  std::vector<int> state_counts;  // alphabet_size^depth per channel

  long length() const { return states.rows(); }
  int channel_count() const { return static_cast<int>(states.cols()); }
};

/// Fit per-channel [min, max] ranges on training data. Every channel needs at
/// least two distinct values; a constant channel has no usable range.
Partitioner fit_partitioner(const TimeSeriesFrame& frame, int alphabet_size);
Partitioner fit_partitioner(const TimeSeriesFrame& frame, const std::vector<int>& alphabet_sizes);

SymbolFrame symbolize(const TimeSeriesFrame& frame, const Partitioner& part);

/// Roll symbol sequences into depth-D state sequences:
///   state(k) = sum_{d=0}^{D-1} symbol(k - d) * |Sigma|^d.
/// For D = 1 states equal symbols.
StateFrame states(const SymbolFrame& symbols, int depth);

}  // namespace stpn
