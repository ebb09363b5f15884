#include "stpn/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace stpn {

namespace {

constexpr long kMinTrainingWindows = 30;
constexpr long kMinBatchWindows = 10;
constexpr long kMinValidationBatches = 10;

char* format_double(char (&buf)[64], double v) {
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

FreeEnergyDistribution fit_distribution(std::vector<double> samples) {
  if (samples.size() < 2) {
    throw ValidationError("free-energy distribution needs at least 2 samples");
  }
  FreeEnergyDistribution d;
  const auto n = static_cast<double>(samples.size());
  d.mu = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double s : samples) ss += (s - d.mu) * (s - d.mu);
  d.sigma = std::sqrt(ss / (n - 1.0));
  // Floor keeps degenerate batches (identical windows) scorable.
  const double floor = 1e-6 * std::max(1.0, std::abs(d.mu));
  d.sigma = std::max(d.sigma, floor);
  d.samples = std::move(samples);
  return d;
}

double gaussian_kld(const FreeEnergyDistribution& p, const FreeEnergyDistribution& q) {
  if (!p.fitted() || !q.fitted()) {
    throw ValidationError("gaussian_kld needs fitted distributions (sigma > 0)");
  }
  const auto kl = [](const FreeEnergyDistribution& a, const FreeEnergyDistribution& b) {
    const double dm = a.mu - b.mu;
    return std::log(b.sigma / a.sigma) +
           (a.sigma * a.sigma + dm * dm) / (2.0 * b.sigma * b.sigma) - 0.5;
  };
  return kl(p, q) + kl(q, p);
}

std::vector<int> PipelineConfig::resolved_alphabet_sizes(int channel_count) const {
  if (!alphabet_sizes.empty()) {
    if (alphabet_sizes.size() != static_cast<std::size_t>(channel_count)) {
      throw ValidationError("alphabet_sizes length does not match channel count");
    }
    return alphabet_sizes;
  }
  return std::vector<int>(static_cast<std::size_t>(channel_count), alphabet_size);
}

void PipelineConfig::validate() const {
  if (alphabet_size < 2) throw ValidationError("alphabet_size must be at least 2");
  for (int s : alphabet_sizes) {
    if (s < 2) throw ValidationError("per-channel alphabet sizes must be at least 2");
  }
  if (depth < 1) throw ValidationError("depth must be at least 1");
  if (window.window_length < depth + 2) {
    throw ValidationError("window_length must be at least depth + 2");
  }
  if (window.stride < 1) throw ValidationError("stride must be at least 1");
  if (batch_windows < kMinBatchWindows) {
    throw ValidationError("batch_windows must be at least " + std::to_string(kMinBatchWindows));
  }
  if (!(target_false_alarm > 0.0 && target_false_alarm < 1.0)) {
    throw ValidationError("target_false_alarm must lie strictly inside (0, 1)");
  }
  if (!(threshold_safety_factor > 0.0)) {
    throw ValidationError("threshold_safety_factor must be positive");
  }
  if (threshold_policy == ThresholdPolicy::Quantile &&
      !(threshold_quantile > 0.0 && threshold_quantile < 1.0)) {
    throw ValidationError("threshold_quantile must lie strictly inside (0, 1)");
  }
  if (n_hidden < 0) throw ValidationError("n_hidden must be non-negative");
}

bool PipelineModel::has_threshold() const { return std::isfinite(detection_threshold); }

bool AnomalyReport::any_anomaly() const {
  return std::any_of(batches.begin(), batches.end(),
                     [](const BatchRecord& b) { return b.verdict; });
}

PipelineModel fit_pipeline(const TimeSeriesFrame& train, const PipelineConfig& cfg) {
  return fit_pipeline(std::vector<TimeSeriesFrame>{train}, cfg);
}

PipelineModel fit_pipeline(const std::vector<TimeSeriesFrame>& train, const PipelineConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw ValidationError("no training frames");

  // Windows per frame, never straddling frame boundaries.
  std::vector<TimeSeriesFrame> train_windows;
  for (const TimeSeriesFrame& frame : train) {
    std::vector<TimeSeriesFrame> w = windows(frame, cfg.window);
    std::move(w.begin(), w.end(), std::back_inserter(train_windows));
  }
  if (static_cast<long>(train_windows.size()) < kMinTrainingWindows) {
    throw ValidationError("training data yields " + std::to_string(train_windows.size()) +
                          " windows; at least " + std::to_string(kMinTrainingWindows) +
                          " are required");
  }

  PipelineModel model;
  model.config = cfg;
  model.stpn = learn_stpn(train, cfg.resolved_alphabet_sizes(train.front().channel_count()),
                          cfg.depth);
  // Thresholds and the RBM corpus both come from leave-window-out scores, so
  // the nominal bit rates seen in training match what unseen nominal data
  // produces at inference time.
  model.stpn = calibrate_thresholds(std::move(model.stpn), train_windows, cfg.threshold_policy,
                                    cfg.threshold_quantile, /*heldout_scores=*/true);

  const int n_visible = model.stpn.pattern_count();
  Eigen::MatrixXd vectors(static_cast<long>(train_windows.size()), n_visible);
  for (std::size_t w = 0; w < train_windows.size(); ++w) {
    const std::vector<double> lam = log_importances_heldout(model.stpn, train_windows[w]);
    for (int i = 0; i < n_visible; ++i) {
      vectors(static_cast<long>(w), i) =
          lam[static_cast<std::size_t>(i)] >= model.stpn.thresholds[static_cast<std::size_t>(i)]
              ? 1.0
              : 0.0;
    }
  }

  TrainConfig rbm_cfg = cfg.rbm;
  rbm_cfg.rng_seed = cfg.seed;
  const int n_hidden = cfg.n_hidden > 0 ? cfg.n_hidden : n_visible;
  model.rbm = train_rbm(vectors, n_hidden, rbm_cfg);

  std::vector<double> energies(train_windows.size());
  for (long w = 0; w < vectors.rows(); ++w) {
    energies[static_cast<std::size_t>(w)] = free_energy(model.rbm, vectors.row(w).transpose());
  }
  model.baseline = fit_distribution(std::move(energies));
  return model;
}

std::vector<double> window_free_energies(const PipelineModel& model,
                                         const TimeSeriesFrame& frame) {
  const std::vector<TimeSeriesFrame> wins = windows(frame, model.config.window);
  std::vector<double> energies(wins.size());
  Eigen::VectorXd v(model.rbm.n_visible());
  for (std::size_t w = 0; w < wins.size(); ++w) {
    const PatternVector pv = infer_pattern_vector(model.stpn, wins[w]);
    for (int i = 0; i < model.rbm.n_visible(); ++i) v(i) = pv.bits[static_cast<std::size_t>(i)];
    energies[w] = free_energy(model.rbm, v);
  }
  return energies;
}

BatchScore score_batch(const PipelineModel& model, const TimeSeriesFrame& test) {
  std::vector<double> energies = window_free_energies(model, test);
  if (static_cast<long>(energies.size()) < kMinBatchWindows) {
    throw ValidationError("test data yields " + std::to_string(energies.size()) +
                          " windows; at least " + std::to_string(kMinBatchWindows) +
                          " are required");
  }
  BatchScore score;
  score.distribution = fit_distribution(std::move(energies));
  score.kld = gaussian_kld(score.distribution, model.baseline);
  return score;
}

AnomalyReport score_online(const PipelineModel& model, const TimeSeriesFrame& stream,
                           int batch_windows) {
  if (batch_windows < kMinBatchWindows) {
    throw ValidationError("batch_windows must be at least " + std::to_string(kMinBatchWindows));
  }
  const std::vector<double> energies = window_free_energies(model, stream);
  const long n_batches = static_cast<long>(energies.size()) / batch_windows;
  if (n_batches < 1) {
    throw ValidationError("stream yields " + std::to_string(energies.size()) +
                          " windows; one batch needs " + std::to_string(batch_windows));
  }

  AnomalyReport report;
  report.baseline = model.baseline;
  report.threshold = model.detection_threshold;
  report.config = model.config;
  for (long b = 0; b < n_batches; ++b) {
    BatchRecord rec;
    rec.batch_index = static_cast<int>(b);
    rec.start_sample = window_start(b * batch_windows, model.config.window);
    std::vector<double> batch(energies.begin() + b * batch_windows,
                              energies.begin() + (b + 1) * batch_windows);
    rec.distribution = fit_distribution(std::move(batch));
    rec.kld = gaussian_kld(rec.distribution, model.baseline);
    rec.mean_free_energy = rec.distribution.mu;
    rec.verdict = model.has_threshold() && rec.kld >= model.detection_threshold;
    report.batches.push_back(std::move(rec));
  }
  return report;
}

double calibrate_threshold(const PipelineModel& model, const TimeSeriesFrame& validation_nominal,
                           double target_false_alarm) {
  return calibrate_threshold(model, std::vector<TimeSeriesFrame>{validation_nominal},
                             target_false_alarm);
}

double calibrate_threshold(const PipelineModel& model,
                           const std::vector<TimeSeriesFrame>& validation_nominal,
                           double target_false_alarm) {
  if (!(target_false_alarm > 0.0 && target_false_alarm < 1.0)) {
    throw ValidationError("target_false_alarm must lie strictly inside (0, 1)");
  }
  std::vector<double> klds;
  for (const TimeSeriesFrame& frame : validation_nominal) {
    const std::vector<double> energies = window_free_energies(model, frame);
    const long n_batches = static_cast<long>(energies.size()) / model.config.batch_windows;
    for (long b = 0; b < n_batches; ++b) {
      std::vector<double> batch(energies.begin() + b * model.config.batch_windows,
                                energies.begin() + (b + 1) * model.config.batch_windows);
      const FreeEnergyDistribution d = fit_distribution(std::move(batch));
      klds.push_back(gaussian_kld(d, model.baseline));
    }
  }
  if (static_cast<long>(klds.size()) < kMinValidationBatches) {
    throw ValidationError("validation data yields " + std::to_string(klds.size()) +
                          " batches; at least " + std::to_string(kMinValidationBatches) +
                          " are required");
  }
  return model.config.threshold_safety_factor * quantile(std::move(klds), 1.0 - target_false_alarm);
}

void write_report_csv(const AnomalyReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "batch_index,start_sample,kld,mean_free_energy,verdict\n";
  char buf[64];
  for (const BatchRecord& b : report.batches) {
    out << b.batch_index << ',' << b.start_sample << ',' << format_double(buf, b.kld) << ',';
    out << format_double(buf, b.mean_free_energy) << ',' << (b.verdict ? "true" : "false")
        << '\n';
  }
  if (!out) throw ValidationError("write to '" + path + "' failed");
}

void write_histogram_csv(const FreeEnergyDistribution& dist, const std::string& path, int bins) {
  if (bins < 1) throw ValidationError("histogram needs at least 1 bin");
  if (dist.samples.empty()) throw ValidationError("histogram of an empty distribution");
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  const auto [lo_it, hi_it] = std::minmax_element(dist.samples.begin(), dist.samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) hi = lo + 1.0;  // all samples identical
  const double width = (hi - lo) / bins;
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  for (double s : dist.samples) {
    auto k = static_cast<long>((s - lo) / width);
    k = std::clamp<long>(k, 0, bins - 1);
    counts[static_cast<std::size_t>(k)] += 1;
  }
  out << "bin_left,bin_right,count\n";
  char buf[64];
  for (int k = 0; k < bins; ++k) {
    out << format_double(buf, lo + k * width) << ',';
    out << format_double(buf, lo + (k + 1) * width) << ',' << counts[static_cast<std::size_t>(k)]
        << '\n';
  }
  if (!out) throw ValidationError("write to '" + path + "' failed");
}

}  // namespace stpn
