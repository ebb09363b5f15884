#pragma once

#include <limits>
#include <string>
#include <vector>

#include "stpn/rbm.hpp"
#include "stpn/stpn.hpp"
#include "stpn/timeseries.hpp"

namespace stpn {

/// Gaussian summary of a set of free-energy samples. sigma is the sample
/// standard deviation (ddof = 1), floored so degenerate batches stay usable.
struct FreeEnergyDistribution {
  std::vector<double> samples;
  double mu = 0.0;
  double sigma = 0.0;

  bool fitted() const { return sigma > 0.0; }
};

FreeEnergyDistribution fit_distribution(std::vector<double> samples);

/// Symmetric Kullback-Leibler distance between two fitted Gaussians,
/// KL(P||Q) + KL(Q||P), each direction in closed form.
double gaussian_kld(const FreeEnergyDistribution& p, const FreeEnergyDistribution& q);

struct PipelineConfig {
  int alphabet_size = 4;
  std::vector<int> alphabet_sizes;  // optional per-channel override
  int depth = 1;
  WindowSpec window{200, 100};
  ThresholdPolicy threshold_policy = ThresholdPolicy::Median;
  double threshold_quantile = 0.5;
  TrainConfig rbm;
  int n_hidden = 0;  // 0 -> one hidden unit per pattern
  int batch_windows = 50;
  double target_false_alarm = 0.05;
  double threshold_safety_factor = 1.5;
  std::uint64_t seed = 1;

  std::vector<int> resolved_alphabet_sizes(int channel_count) const;
  void validate() const;
};

/// Everything needed to score new data: the pattern network, the trained
/// RBM, the nominal free-energy baseline and the detection threshold.
struct PipelineModel {
  StpnModel stpn;
  RbmModel rbm;
  FreeEnergyDistribution baseline;
  double detection_threshold = std::numeric_limits<double>::quiet_NaN();
  PipelineConfig config;

  bool has_threshold() const;
};

struct BatchScore {
  FreeEnergyDistribution distribution;
  double kld = 0.0;
};

struct BatchRecord {
  int batch_index = 0;
  long start_sample = 0;
  double kld = 0.0;
  double mean_free_energy = 0.0;
  bool verdict = false;
  FreeEnergyDistribution distribution;
};

struct AnomalyReport {
  FreeEnergyDistribution baseline;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::vector<BatchRecord> batches;
  PipelineConfig config;

  bool any_anomaly() const;
};

/// Train the full pipeline on nominal data: partitioner -> symbols -> pattern
/// counts -> thresholds -> per-window binary vectors -> RBM -> free-energy
/// baseline. Accepts several frames for multi-mode nominal training; windows
/// never straddle frame boundaries. Needs at least 30 training windows.
PipelineModel fit_pipeline(const std::vector<TimeSeriesFrame>& train, const PipelineConfig& cfg);
PipelineModel fit_pipeline(const TimeSeriesFrame& train, const PipelineConfig& cfg);

/// Free energy of every window of a frame, in window order.
std::vector<double> window_free_energies(const PipelineModel& model, const TimeSeriesFrame& frame);

/// Fit a Gaussian over the test windows' free energies and measure its
/// symmetric KLD against the nominal baseline. Needs >= 10 windows.
BatchScore score_batch(const PipelineModel& model, const TimeSeriesFrame& test);

/// Slide non-overlapping batches of `batch_windows` consecutive windows along
/// the stream; each batch gets a KLD against the baseline and a verdict
/// (KLD >= detection threshold). Needs batch_windows >= 10 and at least one
/// full batch of stream.
AnomalyReport score_online(const PipelineModel& model, const TimeSeriesFrame& stream,
                           int batch_windows);

/// Detection threshold = safety factor times the (1 - target_false_alarm)
/// empirical quantile of nominal-batch KLDs over validation data.
double calibrate_threshold(const PipelineModel& model,
                           const std::vector<TimeSeriesFrame>& validation_nominal,
                           double target_false_alarm);
double calibrate_threshold(const PipelineModel& model, const TimeSeriesFrame& validation_nominal,
                           double target_false_alarm);

/// Report CSV: batch_index,start_sample,kld,mean_free_energy,verdict.
void write_report_csv(const AnomalyReport& report, const std::string& path);

/// Histogram CSV (bin_left,bin_right,count) of one batch's free energies.
void write_histogram_csv(const FreeEnergyDistribution& dist, const std::string& path,
                         int bins = 30);

}  // namespace stpn
