#include "stpn/varsim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

namespace stpn {

namespace {

using json = nlohmann::ordered_json;

void check_spec(const VarSpec& spec) {
  if (spec.channels < 1) throw ValidationError("VAR needs at least 1 channel");
  if (spec.lag_order < 1) throw ValidationError("VAR needs lag order >= 1");
  if (static_cast<int>(spec.coeffs.size()) != spec.lag_order) {
    throw ValidationError("expected " + std::to_string(spec.lag_order) +
                          " coefficient matrices, got " + std::to_string(spec.coeffs.size()));
  }
  for (const auto& a : spec.coeffs) {
    if (a.rows() != spec.channels || a.cols() != spec.channels) {
      throw ValidationError("coefficient matrices must be f x f");
    }
  }
  if (spec.noise_cov.rows() != spec.channels || spec.noise_cov.cols() != spec.channels) {
    throw ValidationError("noise covariance must be f x f");
  }
  if (!spec.noise_cov.isApprox(spec.noise_cov.transpose(), 1e-12)) {
    throw ValidationError("noise covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.noise_cov);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw ValidationError("noise covariance must be positive definite");
  }
  const double rho = companion_spectral_radius(spec);
  if (!(rho < 1.0)) {
    throw ValidationError("unstable VAR: companion spectral radius " + std::to_string(rho));
  }
}

Eigen::MatrixXd edges_to_coefficients(const std::vector<std::pair<int, int>>& edges, int f,
                                      double coupling, double self_coefficient) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(f, f);
  a.diagonal().setConstant(self_coefficient);
  for (const auto& [from, to] : edges) {
    if (from < 0 || from >= f || to < 0 || to >= f) {
      throw ValidationError("edge (" + std::to_string(from) + ", " + std::to_string(to) +
                            ") outside vertex range");
    }
    a(to, from) = coupling;
  }
  return a;
}

ScenarioPattern make_pattern(std::string label, bool nominal,
                             std::vector<std::pair<int, int>> edges, const ScenarioSuite& suite,
                             std::uint64_t seed) {
  ScenarioPattern p;
  p.label = std::move(label);
  p.nominal = nominal;
  p.edges = std::move(edges);
  p.spec = make_var_spec(
      {edges_to_coefficients(p.edges, suite.channels, suite.coupling_strength,
                             suite.self_coefficient)},
      Eigen::MatrixXd::Identity(suite.channels, suite.channels), seed);
  return p;
}

std::vector<std::pair<int, int>> remove_edge(std::vector<std::pair<int, int>> edges,
                                             std::pair<int, int> edge) {
  const auto it = std::find(edges.begin(), edges.end(), edge);
  if (it == edges.end()) throw ValidationError("edge to remove is not present");
  edges.erase(it);
  return edges;
}

std::vector<std::pair<int, int>> fail_vertex(const std::vector<std::pair<int, int>>& edges,
                                             int vertex) {
  std::vector<std::pair<int, int>> kept;
  for (const auto& e : edges) {
    if (e.first != vertex && e.second != vertex) kept.push_back(e);
  }
  return kept;
}

}  // namespace

double companion_spectral_radius(const VarSpec& spec) {
  const int f = spec.channels;
  const int p = spec.lag_order;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(f * p, f * p);
  for (int k = 0; k < p; ++k) {
    companion.block(0, k * f, f, f) = spec.coeffs[static_cast<std::size_t>(k)];
  }
  if (p > 1) {
    companion.block(f, 0, f * (p - 1), f * (p - 1)).setIdentity();
  }
  return companion.eigenvalues().cwiseAbs().maxCoeff();
}

VarSpec make_var_spec(std::vector<Eigen::MatrixXd> coeffs, Eigen::MatrixXd noise_cov,
                      std::uint64_t seed) {
  VarSpec spec;
  spec.channels = static_cast<int>(noise_cov.rows());
  spec.lag_order = static_cast<int>(coeffs.size());
  spec.coeffs = std::move(coeffs);
  spec.noise_cov = std::move(noise_cov);
  spec.seed = seed;
  check_spec(spec);
  return spec;
}

TimeSeriesFrame generate(const VarSpec& spec, long samples, long burn_in) {
  check_spec(spec);
  if (samples < 1) throw ValidationError("need at least 1 sample");
  if (burn_in < spec.lag_order) {
    throw ValidationError("burn_in must be at least the lag order");
  }

  const int f = spec.channels;
  const int p = spec.lag_order;
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(spec.noise_cov).matrixL();

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto draw_noise = [&]() {
    Eigen::VectorXd z(f);
    for (int i = 0; i < f; ++i) z(i) = gauss(rng);
    return Eigen::VectorXd(chol * z);
  };

  const long total = samples + burn_in;
  Eigen::MatrixXd y(total, f);
  for (long t = 0; t < p; ++t) y.row(t) = draw_noise().transpose();
  for (long t = p; t < total; ++t) {
    Eigen::VectorXd next = draw_noise();
    for (int k = 0; k < p; ++k) {
      next += spec.coeffs[static_cast<std::size_t>(k)] * y.row(t - k - 1).transpose();
    }
    y.row(t) = next.transpose();
  }

  TimeSeriesFrame frame;
  frame.channels.reserve(static_cast<std::size_t>(f));
  for (int i = 0; i < f; ++i) frame.channels.push_back("s" + std::to_string(i + 1));
  frame.data = y.bottomRows(samples);
  return frame;
}

ScenarioSuite build_case_suite(CaseStudy case_study, double coupling_strength) {
  if (!(coupling_strength > 0.0)) {
    throw ValidationError("coupling_strength must be positive");
  }
  ScenarioSuite suite;
  suite.channels = 5;
  suite.lag_order = 1;
  suite.coupling_strength = coupling_strength;
  suite.self_coefficient = 0.4;
  suite.samples = 20000;
  suite.burn_in = 500;

  // Hierarchical five-vertex graph: vertex 1 drives 2 and 3, which drive
  // 4 and 5. Zero-indexed below.
  const std::vector<std::pair<int, int>> tree = {{0, 1}, {0, 2}, {1, 3}, {2, 4}};

  if (case_study == CaseStudy::I) {
    suite.name = "case1";
    suite.base_seed = 20160311;
    suite.patterns.push_back(make_pattern("nominal", true, tree, suite, suite.base_seed));
    for (int v = 0; v < suite.channels; ++v) {
      suite.patterns.push_back(make_pattern("anomaly" + std::to_string(v + 1), false,
                                            fail_vertex(tree, v), suite,
                                            suite.base_seed + static_cast<std::uint64_t>(v) + 1));
    }
  } else {
    suite.name = "case2";
    suite.base_seed = 20160322;
    // Three operating modes share the backbone 0->1, 1->3, 2->4 and differ in
    // one extra interaction each. Anomalies disconnect one backbone link (an
    // arrow present in all three nominal graphs) from some mode.
    const std::vector<std::pair<int, int>> mode1 = {{0, 1}, {1, 3}, {2, 4}, {0, 2}};
    const std::vector<std::pair<int, int>> mode2 = {{0, 1}, {1, 3}, {2, 4}, {1, 2}};
    const std::vector<std::pair<int, int>> mode3 = {{0, 1}, {1, 3}, {2, 4}, {3, 4}};
    const std::vector<std::vector<std::pair<int, int>>> anomalies = {
        remove_edge(mode1, {0, 1}), remove_edge(mode2, {1, 3}), remove_edge(mode3, {2, 4}),
        remove_edge(mode1, {1, 3}), remove_edge(mode2, {0, 1}),
    };
    std::uint64_t seed = suite.base_seed;
    suite.patterns.push_back(make_pattern("nominal1", true, mode1, suite, seed++));
    suite.patterns.push_back(make_pattern("nominal2", true, mode2, suite, seed++));
    suite.patterns.push_back(make_pattern("nominal3", true, mode3, suite, seed++));
    for (std::size_t i = 0; i < anomalies.size(); ++i) {
      suite.patterns.push_back(
          make_pattern("anomaly" + std::to_string(i + 1), false, anomalies[i], suite, seed++));
    }
  }
  return suite;
}

std::string suite_to_json(const ScenarioSuite& suite) {
  json j;
  j["name"] = suite.name;
  j["f"] = suite.channels;
  j["p"] = suite.lag_order;
  j["coupling_strength"] = suite.coupling_strength;
  j["self_coefficient"] = suite.self_coefficient;
  j["noise"] = "identity";
  j["base_seed"] = suite.base_seed;
  j["samples"] = suite.samples;
  j["burn_in"] = suite.burn_in;
  j["patterns"] = json::array();
  for (const auto& p : suite.patterns) {
    json e = json::array();
    for (const auto& [from, to] : p.edges) e.push_back(json::array({from, to}));
    j["patterns"].push_back(
        {{"label", p.label}, {"nominal", p.nominal}, {"edges", e}, {"seed", p.spec.seed}});
  }
  return j.dump(2) + "\n";
}

ScenarioSuite suite_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON parse error: ") + e.what());
  }
  try {
    ScenarioSuite suite;
    suite.name = j.at("name").get<std::string>();
    suite.channels = j.at("f").get<int>();
    suite.lag_order = j.at("p").get<int>();
    if (suite.lag_order != 1) {
      throw ConfigError("scenario files currently describe lag-1 structures only");
    }
    suite.coupling_strength = j.at("coupling_strength").get<double>();
    suite.self_coefficient = j.at("self_coefficient").get<double>();
    if (j.at("noise").get<std::string>() != "identity") {
      throw ConfigError("scenario noise must be \"identity\"");
    }
    suite.base_seed = j.at("base_seed").get<std::uint64_t>();
    suite.samples = j.at("samples").get<long>();
    suite.burn_in = j.at("burn_in").get<long>();
    for (const auto& pj : j.at("patterns")) {
      ScenarioPattern p;
      p.label = pj.at("label").get<std::string>();
      p.nominal = pj.at("nominal").get<bool>();
      for (const auto& ej : pj.at("edges")) {
        p.edges.emplace_back(ej.at(0).get<int>(), ej.at(1).get<int>());
      }
      p.spec = make_var_spec(
          {edges_to_coefficients(p.edges, suite.channels, suite.coupling_strength,
                                 suite.self_coefficient)},
          Eigen::MatrixXd::Identity(suite.channels, suite.channels),
          pj.at("seed").get<std::uint64_t>());
      suite.patterns.push_back(std::move(p));
    }
    if (suite.patterns.empty()) throw ConfigError("scenario has no patterns");
    return suite;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
}

}  // namespace stpn
