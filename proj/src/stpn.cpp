#include "stpn/stpn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stpn {

namespace {

double lng(std::int64_t n) { return std::lgamma(static_cast<double>(n)); }

void check_shapes(const EmissionCounts& model, const EmissionCounts& window) {
  if (model.counts.rows() != window.counts.rows() || model.counts.cols() != window.counts.cols()) {
    throw ValidationError("count-matrix shape mismatch: model " +
                          std::to_string(model.counts.rows()) + "x" +
                          std::to_string(model.counts.cols()) + ", window " +
                          std::to_string(window.counts.rows()) + "x" +
                          std::to_string(window.counts.cols()));
  }
}

}  // namespace

bool StpnModel::calibrated() const {
  if (thresholds.size() != static_cast<std::size_t>(pattern_count())) return false;
  return std::all_of(thresholds.begin(), thresholds.end(),
                     [](double t) { return std::isfinite(t); });
}

EmissionCounts learn_counts(const StateFrame& states_frame, int channel_a,
                            const SymbolFrame& symbols_frame, int channel_b) {
  const int depth = states_frame.depth;
  if (states_frame.length() != symbols_frame.length() - depth + 1) {
    throw ValidationError("state sequence length " + std::to_string(states_frame.length()) +
                          " does not align with symbol length " +
                          std::to_string(symbols_frame.length()) + " at depth " +
                          std::to_string(depth));
  }
  if (states_frame.length() < 2) {
    throw ValidationError("need at least 2 states to observe a transition");
  }
  EmissionCounts out;
  out.source = channel_a;
  out.target = channel_b;
  const int n_states = states_frame.state_counts.at(static_cast<std::size_t>(channel_a));
  const int sigma = symbols_frame.alphabet_sizes.at(static_cast<std::size_t>(channel_b));
  out.counts.setZero(n_states, sigma);
  // State k sits at symbol time k + depth - 1; it emits the next symbol of
  // channel b, at time k + depth.
  for (long k = 0; k + 1 < states_frame.length(); ++k) {
    const std::int32_t m = states_frame.states(k, channel_a);
    const std::int32_t n = symbols_frame.symbols(k + depth, channel_b);
    out.counts(m, n) += 1;
  }
  return out;
}

double log_B(const std::vector<std::int64_t>& counts_row) {
  std::int64_t row_total = 0;
  double acc = 0.0;
  for (std::int64_t c : counts_row) {
    if (c < 0) throw ValidationError("negative count");
    row_total += c;
    acc += lng(c + 1);
  }
  const auto sigma = static_cast<std::int64_t>(counts_row.size());
  return acc - lng(row_total + sigma);
}

double log_importance(const EmissionCounts& model_counts, const EmissionCounts& window_counts) {
  check_shapes(model_counts, window_counts);
  const long rows = model_counts.counts.rows();
  const long sigma = model_counts.counts.cols();
  double acc = 0.0;
  for (long m = 0; m < rows; ++m) {
    const std::int64_t n_m = model_counts.row_total(static_cast<int>(m));
    const std::int64_t nt_m = window_counts.row_total(static_cast<int>(m));
    acc += lng(nt_m + 1) + lng(n_m + sigma) - lng(nt_m + n_m + sigma);
    for (long n = 0; n < sigma; ++n) {
      const std::int64_t n_mn = model_counts.counts(m, n);
      const std::int64_t nt_mn = window_counts.counts(m, n);
      acc += lng(nt_mn + n_mn + 1) - lng(nt_mn + 1) - lng(n_mn + 1);
    }
  }
  return acc;
}

StpnModel learn_stpn(const std::vector<TimeSeriesFrame>& training, int alphabet_size, int depth) {
  if (training.empty()) throw ValidationError("no training frames");
  return learn_stpn(training,
                    std::vector<int>(static_cast<std::size_t>(training.front().channel_count()),
                                     alphabet_size),
                    depth);
}

StpnModel learn_stpn(const std::vector<TimeSeriesFrame>& training,
                     const std::vector<int>& alphabet_sizes, int depth) {
  if (training.empty()) throw ValidationError("no training frames");
  const TimeSeriesFrame pooled = training.size() == 1 ? training.front() : concat(training);

  StpnModel model;
  model.channel_count = pooled.channel_count();
  model.depth = depth;
  model.channels = pooled.channels;
  model.alphabet_sizes = alphabet_sizes;
  model.partitioner = fit_partitioner(pooled, alphabet_sizes);
  model.thresholds.assign(static_cast<std::size_t>(model.pattern_count()),
                          std::numeric_limits<double>::quiet_NaN());

  const int f = model.channel_count;
  model.counts.resize(static_cast<std::size_t>(f * f));
  bool first = true;
  for (const TimeSeriesFrame& frame : training) {
    if (frame.channels != pooled.channels) {
      throw ValidationError("training frames disagree on channel lists");
    }
    const SymbolFrame sym = symbolize(frame, model.partitioner);
    const StateFrame st = states(sym, depth);
    for (int a = 0; a < f; ++a) {
      for (int b = 0; b < f; ++b) {
        EmissionCounts c = learn_counts(st, a, sym, b);
        auto& slot = model.counts[static_cast<std::size_t>(model.pattern_index(a, b))];
        if (first) {
          slot = std::move(c);
        } else {
          slot.counts += c.counts;
        }
      }
    }
    first = false;
  }
  return model;
}

std::vector<EmissionCounts> window_counts(const StpnModel& model, const TimeSeriesFrame& window) {
  if (window.channel_count() != model.channel_count) {
    throw ValidationError("window has " + std::to_string(window.channel_count()) +
                          " channels, model expects " + std::to_string(model.channel_count));
  }
  if (window.samples() < model.depth + 1) {
    throw ValidationError("window of " + std::to_string(window.samples()) +
                          " samples yields no transition at depth " + std::to_string(model.depth));
  }
  const SymbolFrame sym = symbolize(window, model.partitioner);
  const StateFrame st = states(sym, model.depth);
  const int f = model.channel_count;
  std::vector<EmissionCounts> out;
  out.reserve(static_cast<std::size_t>(f * f));
  for (int a = 0; a < f; ++a) {
    for (int b = 0; b < f; ++b) {
      out.push_back(learn_counts(st, a, sym, b));
    }
  }
  return out;
}

std::vector<double> log_importances(const StpnModel& model, const TimeSeriesFrame& window) {
  const std::vector<EmissionCounts> wc = window_counts(model, window);
  std::vector<double> out(wc.size());
  for (std::size_t i = 0; i < wc.size(); ++i) {
    out[i] = log_importance(model.counts[i], wc[i]);
  }
  return out;
}

std::vector<double> log_importances_heldout(const StpnModel& model, const TimeSeriesFrame& window) {
  const std::vector<EmissionCounts> wc = window_counts(model, window);
  std::vector<double> out(wc.size());
  for (std::size_t i = 0; i < wc.size(); ++i) {
    EmissionCounts rest = model.counts[i];
    // Clamp guards windows that are not an exact training subsegment.
    rest.counts = (rest.counts - wc[i].counts).cwiseMax(0);
    out[i] = log_importance(rest, wc[i]);
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

StpnModel calibrate_thresholds(StpnModel model, const std::vector<TimeSeriesFrame>& training_windows) {
  const ThresholdPolicy policy = model.threshold_policy;
  const double q = model.threshold_quantile;
  return calibrate_thresholds(std::move(model), training_windows, policy, q);
}

StpnModel calibrate_thresholds(StpnModel model, const std::vector<TimeSeriesFrame>& training_windows,
                               ThresholdPolicy policy, double q, bool heldout_scores) {
  if (policy == ThresholdPolicy::Absolute) {
    if (!model.calibrated()) {
      throw ValidationError("absolute threshold policy requires thresholds supplied up front");
    }
    model.threshold_policy = policy;
    return model;
  }
  if (training_windows.size() < 2) {
    throw ValidationError("threshold calibration needs at least 2 windows");
  }
  const double level = policy == ThresholdPolicy::Median ? 0.5 : q;
  std::vector<std::vector<double>> per_pattern(
      static_cast<std::size_t>(model.pattern_count()),
      std::vector<double>{});
  for (const TimeSeriesFrame& w : training_windows) {
    const std::vector<double> lam =
        heldout_scores ? log_importances_heldout(model, w) : log_importances(model, w);
    for (std::size_t i = 0; i < lam.size(); ++i) per_pattern[i].push_back(lam[i]);
  }
  for (std::size_t i = 0; i < per_pattern.size(); ++i) {
    model.thresholds[i] = quantile(per_pattern[i], level);
  }
  model.threshold_policy = policy;
  model.threshold_quantile = level;
  return model;
}

PatternVector infer_pattern_vector(const StpnModel& model, const TimeSeriesFrame& window) {
  if (!model.calibrated()) {
    throw ValidationError("pattern thresholds are not calibrated");
  }
  PatternVector vec;
  vec.log_lambda = log_importances(model, window);
  vec.bits.resize(vec.log_lambda.size());
  for (std::size_t i = 0; i < vec.log_lambda.size(); ++i) {
    vec.bits[i] = vec.log_lambda[i] >= model.thresholds[i] ? 1 : 0;
  }
  return vec;
}

}  // namespace stpn
