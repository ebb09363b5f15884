#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "stpn/symbolic.hpp"
#include "stpn/timeseries.hpp"

namespace stpn {

/// Emission-count matrix of one pattern a -> b: counts(m, n) is the number of
/// times symbol n of channel b follows state m of channel a. These counts are
/// the sufficient statistics behind the Dirichlet posterior of the pattern.
struct EmissionCounts {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;  // |Q^a| x |Sigma^b|
  int source = 0;  // a, state channel
  int target = 0;  // b, symbol channel

  std::int64_t row_total(int m) const { return counts.row(m).sum(); }
  std::int64_t total() const { return counts.sum(); }
};

enum class ThresholdPolicy { Median, Quantile, Absolute };

/// Learned spatiotemporal pattern network: f atomic patterns (a == b) plus
/// f(f-1) relational patterns (a != b), stored row-major by (a, b), together
/// with the symbolization recipe and per-pattern binarization thresholds.
struct StpnModel {
  int channel_count = 0;
  int depth = 1;
  std::vector<std::string> channels;
  std::vector<int> alphabet_sizes;
  Partitioner partitioner;
  std::vector<EmissionCounts> counts;    // f*f, index a * f + b
  std::vector<double> thresholds;        // f*f, NaN until calibrated
  ThresholdPolicy threshold_policy = ThresholdPolicy::Median;
  double threshold_quantile = 0.5;

  int pattern_count() const { return channel_count * channel_count; }
  int pattern_index(int a, int b) const { return a * channel_count + b; }
  bool calibrated() const;
};

/// Per-window binary activation of every pattern, plus the raw scores the
/// bits were cut from.
struct PatternVector {
  std::vector<std::uint8_t> bits;     // length f*f
  std::vector<double> log_lambda;     // same order
};

/// Count state->symbol emissions between one state channel and one symbol
/// channel. The state sequence must come from the same symbol length and
/// depth (state length == symbol length - depth + 1).
EmissionCounts learn_counts(const StateFrame& states_frame, int channel_a,
                            const SymbolFrame& symbols_frame, int channel_b);

/// log of the Dirichlet normalizer of one count row:
///   log[ prod_n (N_mn)! / (N_m + |Sigma| - 1)! ]
/// evaluated with log-gamma so large counts cannot overflow.
double log_B(const std::vector<std::int64_t>& counts_row);

/// log importance of a pattern given model counts N and window counts Ntilde,
/// up to the additive constant log K:
///   sum_m [ lnG(Nt_m+1) + lnG(N_m+|S|) - lnG(Nt_m+N_m+|S|)
///           + sum_n ( lnG(Nt_mn+N_mn+1) - lnG(Nt_mn+1) - lnG(N_mn+1) ) ]
/// High when the window's emission evidence agrees with the model posterior.
double log_importance(const EmissionCounts& model_counts, const EmissionCounts& window_counts);

/// Learn all f*f count matrices from full training frames (counts summed
/// across frames; the partitioner is fitted on the pooled data). Thresholds
/// are left uncalibrated.
StpnModel learn_stpn(const std::vector<TimeSeriesFrame>& training, const std::vector<int>& alphabet_sizes,
                     int depth);
StpnModel learn_stpn(const std::vector<TimeSeriesFrame>& training, int alphabet_size, int depth);

/// All f*f emission-count matrices of one window, symbolized with the model's
/// partitioner.
std::vector<EmissionCounts> window_counts(const StpnModel& model, const TimeSeriesFrame& window);

/// Raw log-importance of every pattern for one window, model pattern order.
std::vector<double> log_importances(const StpnModel& model, const TimeSeriesFrame& window);

/// Same, but with the window's own transitions subtracted from the model
/// counts first. Use for windows that are part of the model's training data:
/// scoring them against the full counts is biased high, and thresholds set
/// from biased scores do not transfer to unseen data.
std::vector<double> log_importances_heldout(const StpnModel& model, const TimeSeriesFrame& window);

/// Set per-pattern thresholds from the training windows' log-importance
/// values: the median by default, another quantile or absolute values by
/// policy. Needs at least two windows.
/// When heldout_scores is set the quantiles are taken over leave-window-out
/// scores (see log_importances_heldout).
StpnModel calibrate_thresholds(StpnModel model, const std::vector<TimeSeriesFrame>& training_windows);
StpnModel calibrate_thresholds(StpnModel model, const std::vector<TimeSeriesFrame>& training_windows,
                               ThresholdPolicy policy, double quantile,
                               bool heldout_scores = false);

/// Binarize one window: bit = 1 iff log importance >= threshold (ties to 1).
PatternVector infer_pattern_vector(const StpnModel& model, const TimeSeriesFrame& window);

/// Linearly interpolated empirical quantile (the convention used everywhere
/// in this library; q = 0.5 is the median).
double quantile(std::vector<double> values, double q);

}  // namespace stpn
