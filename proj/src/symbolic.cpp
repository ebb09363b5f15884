#include "stpn/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stpn {

std::vector<double> Partitioner::edges(int channel) const {
  const Channel& ch = channels.at(static_cast<std::size_t>(channel));
  std::vector<double> e(static_cast<std::size_t>(ch.alphabet_size - 1));
  const double width = (ch.hi - ch.lo) / ch.alphabet_size;
  for (int i = 1; i < ch.alphabet_size; ++i) {
    e[static_cast<std::size_t>(i - 1)] = ch.lo + i * width;
  }
  return e;
}

int Partitioner::symbol(int channel, double value) const {
  const Channel& ch = channels.at(static_cast<std::size_t>(channel));
  // symbol = number of edges <= value; clamps out-of-range values to the
  // boundary cells and puts edge ties in the upper cell.
  const double width = (ch.hi - ch.lo) / ch.alphabet_size;
  int s = 0;
  for (int i = 1; i < ch.alphabet_size; ++i) {
    if (ch.lo + i * width <= value) s = i;
  }
  return s;
}

Partitioner fit_partitioner(const TimeSeriesFrame& frame, int alphabet_size) {
  return fit_partitioner(frame, std::vector<int>(static_cast<std::size_t>(frame.channel_count()),
                                                 alphabet_size));
}

Partitioner fit_partitioner(const TimeSeriesFrame& frame, const std::vector<int>& alphabet_sizes) {
  if (frame.samples() < 1) throw ValidationError("cannot fit a partitioner on an empty frame");
  if (alphabet_sizes.size() != static_cast<std::size_t>(frame.channel_count())) {
    throw ValidationError("alphabet_sizes length does not match channel count");
  }
  Partitioner part;
  part.channels.resize(alphabet_sizes.size());
  for (int c = 0; c < frame.channel_count(); ++c) {
    const int sigma = alphabet_sizes[static_cast<std::size_t>(c)];
    if (sigma < 2) throw ValidationError("alphabet_size must be at least 2");
    const double lo = frame.data.col(c).minCoeff();
    const double hi = frame.data.col(c).maxCoeff();
    if (!(hi > lo)) {
      throw ValidationError("channel '" + frame.channels[static_cast<std::size_t>(c)] +
                            "' is constant; zero range cannot be partitioned");
    }
    part.channels[static_cast<std::size_t>(c)] = {lo, hi, sigma};
  }
  return part;
}

SymbolFrame symbolize(const TimeSeriesFrame& frame, const Partitioner& part) {
  if (frame.channel_count() != part.channel_count()) {
    throw ValidationError("frame has " + std::to_string(frame.channel_count()) +
                          " channels, partitioner has " + std::to_string(part.channel_count()));
  }
  SymbolFrame out;
  out.symbols.resize(frame.samples(), frame.channel_count());
  out.alphabet_sizes.resize(part.channels.size());
  for (int c = 0; c < frame.channel_count(); ++c) {
    out.alphabet_sizes[static_cast<std::size_t>(c)] =
        part.channels[static_cast<std::size_t>(c)].alphabet_size;
    for (long t = 0; t < frame.samples(); ++t) {
      out.symbols(t, c) = part.symbol(c, frame.data(t, c));
    }
  }
  return out;
}

StateFrame states(const SymbolFrame& symbols, int depth) {
  if (depth < 1) throw ValidationError("depth must be at least 1");
  if (symbols.length() < depth) {
    throw ValidationError("symbol sequence of length " + std::to_string(symbols.length()) +
                          " is shorter than depth " + std::to_string(depth));
  }
  StateFrame out;
  out.depth = depth;
  out.states.resize(symbols.length() - depth + 1, symbols.channel_count());
  out.state_counts.resize(symbols.alphabet_sizes.size());
  for (int c = 0; c < symbols.channel_count(); ++c) {
    const int sigma = symbols.alphabet_sizes[static_cast<std::size_t>(c)];
    std::int64_t n_states = 1;
    for (int d = 0; d < depth; ++d) n_states *= sigma;
    if (n_states > (std::int64_t{1} << 30)) {
      throw ValidationError("state count overflow: alphabet " + std::to_string(sigma) +
                            " at depth " + std::to_string(depth));
    }
    out.state_counts[static_cast<std::size_t>(c)] = static_cast<int>(n_states);
    for (long k = depth - 1; k < symbols.length(); ++k) {
      std::int32_t state = 0;
      std::int32_t digit = 1;
      for (int d = 0; d < depth; ++d) {
        state += symbols.symbols(k - d, c) * digit;
        digit *= sigma;
      }
      out.states(k - depth + 1, c) = state;
    }
  }
  return out;
}

}  // namespace stpn
