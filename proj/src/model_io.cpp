#include "stpn/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace stpn {

namespace {

using json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

std::string policy_name(ThresholdPolicy p) {
  switch (p) {
    case ThresholdPolicy::Median: return "median";
    case ThresholdPolicy::Quantile: return "quantile";
    case ThresholdPolicy::Absolute: return "absolute";
  }
  throw ValidationError("unknown threshold policy");
}

ThresholdPolicy policy_from_name(const std::string& name) {
  if (name == "median") return ThresholdPolicy::Median;
  if (name == "quantile") return ThresholdPolicy::Quantile;
  if (name == "absolute") return ThresholdPolicy::Absolute;
  throw ConfigError("unknown threshold policy '" + name + "'");
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (long r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = static_cast<long>(j.size());
  if (rows == 0) throw ConfigError("empty matrix in model file");
  const auto cols = static_cast<long>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (static_cast<long>(j.at(r).size()) != cols) {
      throw ConfigError("ragged matrix in model file");
    }
    for (long c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<long>(j.size()));
  for (long i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

json config_to_json(const PipelineConfig& cfg) {
  json j;
  j["alphabet_size"] = cfg.alphabet_size;
  j["alphabet_sizes"] = cfg.alphabet_sizes;
  j["depth"] = cfg.depth;
  j["window_length"] = cfg.window.window_length;
  j["stride"] = cfg.window.stride;
  j["threshold_policy"] = policy_name(cfg.threshold_policy);
  j["threshold_quantile"] = cfg.threshold_quantile;
  j["rbm"] = {{"learning_rate", cfg.rbm.learning_rate},
              {"epochs", cfg.rbm.epochs},
              {"minibatch_size", cfg.rbm.minibatch_size},
              {"cd_steps", cfg.rbm.cd_steps},
              {"init_weight_scale", cfg.rbm.init_weight_scale},
              {"n_hidden", cfg.n_hidden}};
  j["batch_windows"] = cfg.batch_windows;
  j["target_false_alarm"] = cfg.target_false_alarm;
  j["threshold_safety_factor"] = cfg.threshold_safety_factor;
  j["seed"] = cfg.seed;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig cfg;
  cfg.alphabet_size = j.at("alphabet_size").get<int>();
  cfg.alphabet_sizes = j.at("alphabet_sizes").get<std::vector<int>>();
  cfg.depth = j.at("depth").get<int>();
  cfg.window.window_length = j.at("window_length").get<int>();
  cfg.window.stride = j.at("stride").get<int>();
  cfg.threshold_policy = policy_from_name(j.at("threshold_policy").get<std::string>());
  cfg.threshold_quantile = j.at("threshold_quantile").get<double>();
  const json& r = j.at("rbm");
  cfg.rbm.learning_rate = r.at("learning_rate").get<double>();
  cfg.rbm.epochs = r.at("epochs").get<int>();
  cfg.rbm.minibatch_size = r.at("minibatch_size").get<int>();
  cfg.rbm.cd_steps = r.at("cd_steps").get<int>();
  cfg.rbm.init_weight_scale = r.at("init_weight_scale").get<double>();
  cfg.n_hidden = r.at("n_hidden").get<int>();
  cfg.batch_windows = j.at("batch_windows").get<int>();
  cfg.target_false_alarm = j.at("target_false_alarm").get<double>();
  cfg.threshold_safety_factor = j.at("threshold_safety_factor").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

std::string pipeline_to_json(const PipelineModel& model) {
  const StpnModel& s = model.stpn;
  json j;
  j["version"] = kFormatVersion;
  j["f"] = s.channel_count;
  j["depth"] = s.depth;
  j["channels"] = s.channels;

  json part = json::array();
  for (const auto& ch : s.partitioner.channels) {
    part.push_back({{"lo", ch.lo}, {"hi", ch.hi}, {"alphabet_size", ch.alphabet_size}});
  }
  j["partitioner"] = std::move(part);

  // counts[a][b]: one |Q^a| x |Sigma^b| integer matrix per pattern.
  json counts = json::array();
  json thresholds = json::array();
  for (int a = 0; a < s.channel_count; ++a) {
    json counts_row = json::array();
    json thr_row = json::array();
    for (int b = 0; b < s.channel_count; ++b) {
      const auto& c = s.counts[static_cast<std::size_t>(s.pattern_index(a, b))].counts;
      json m = json::array();
      for (long r = 0; r < c.rows(); ++r) {
        json row = json::array();
        for (long k = 0; k < c.cols(); ++k) row.push_back(c(r, k));
        m.push_back(std::move(row));
      }
      counts_row.push_back(std::move(m));
      thr_row.push_back(s.thresholds[static_cast<std::size_t>(s.pattern_index(a, b))]);
    }
    counts.push_back(std::move(counts_row));
    thresholds.push_back(std::move(thr_row));
  }
  j["counts"] = std::move(counts);
  j["thresholds"] = std::move(thresholds);
  j["threshold_policy"] = policy_name(s.threshold_policy);
  j["threshold_quantile"] = s.threshold_quantile;

  j["rbm"] = {{"n_visible", model.rbm.n_visible()},
              {"n_hidden", model.rbm.n_hidden()},
              {"W", matrix_to_json(model.rbm.weights)},
              {"b_visible", vector_to_json(model.rbm.visible_bias)},
              {"b_hidden", vector_to_json(model.rbm.hidden_bias)}};

  j["baseline"] = {{"mu", model.baseline.mu},
                   {"sigma", model.baseline.sigma},
                   {"count", model.baseline.samples.size()}};
  if (model.has_threshold()) {
    j["detection_threshold"] = model.detection_threshold;
  } else {
    j["detection_threshold"] = nullptr;
  }
  j["config"] = config_to_json(model.config);
  return j.dump(2) + "\n";
}

PipelineModel pipeline_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model JSON parse error: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != kFormatVersion) {
      throw ConfigError("unsupported model file version");
    }
    PipelineModel model;
    StpnModel& s = model.stpn;
    s.channel_count = j.at("f").get<int>();
    s.depth = j.at("depth").get<int>();
    s.channels = j.at("channels").get<std::vector<std::string>>();

    for (const auto& pj : j.at("partitioner")) {
      Partitioner::Channel ch;
      ch.lo = pj.at("lo").get<double>();
      ch.hi = pj.at("hi").get<double>();
      ch.alphabet_size = pj.at("alphabet_size").get<int>();
      s.partitioner.channels.push_back(ch);
      s.alphabet_sizes.push_back(ch.alphabet_size);
    }

    const json& counts = j.at("counts");
    const json& thresholds = j.at("thresholds");
    s.counts.resize(static_cast<std::size_t>(s.pattern_count()));
    s.thresholds.resize(static_cast<std::size_t>(s.pattern_count()));
    for (int a = 0; a < s.channel_count; ++a) {
      for (int b = 0; b < s.channel_count; ++b) {
        const json& m = counts.at(a).at(b);
        EmissionCounts ec;
        ec.source = a;
        ec.target = b;
        const auto rows = static_cast<long>(m.size());
        const auto cols = static_cast<long>(m.at(0).size());
        ec.counts.resize(rows, cols);
        for (long r = 0; r < rows; ++r) {
          for (long c = 0; c < cols; ++c) {
            ec.counts(r, c) = m.at(r).at(c).get<std::int64_t>();
          }
        }
        const int idx = s.pattern_index(a, b);
        s.counts[static_cast<std::size_t>(idx)] = std::move(ec);
        s.thresholds[static_cast<std::size_t>(idx)] = thresholds.at(a).at(b).get<double>();
      }
    }
    s.threshold_policy = policy_from_name(j.at("threshold_policy").get<std::string>());
    s.threshold_quantile = j.at("threshold_quantile").get<double>();

    const json& r = j.at("rbm");
    model.rbm.weights = matrix_from_json(r.at("W"));
    model.rbm.visible_bias = vector_from_json(r.at("b_visible"));
    model.rbm.hidden_bias = vector_from_json(r.at("b_hidden"));
    if (model.rbm.n_visible() != r.at("n_visible").get<int>() ||
        model.rbm.n_hidden() != r.at("n_hidden").get<int>()) {
      throw ConfigError("RBM dimensions disagree with stored parameters");
    }
    if (model.rbm.n_visible() != s.pattern_count()) {
      throw ConfigError("RBM visible layer does not match pattern count");
    }

    model.baseline.mu = j.at("baseline").at("mu").get<double>();
    model.baseline.sigma = j.at("baseline").at("sigma").get<double>();
    if (!j.at("detection_threshold").is_null()) {
      model.detection_threshold = j.at("detection_threshold").get<double>();
    }
    model.config = config_from_json(j.at("config"));
    return model;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model JSON: ") + e.what());
  }
}

void save_pipeline(const PipelineModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << pipeline_to_json(model);
  if (!out) throw ValidationError("write to '" + path + "' failed");
}

PipelineModel load_pipeline(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return pipeline_from_json(ss.str());
}

}  // namespace stpn
