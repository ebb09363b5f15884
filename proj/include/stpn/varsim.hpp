#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stpn/timeseries.hpp"

namespace stpn {

/// Vector autoregressive process of order p:
///   y_t = sum_{k=1}^{p} A_k y_{t-k} + e_t,   e_t ~ N(0, noise_cov).
/// coeffs[k](i, j) is the influence of channel j at lag k+1 on channel i.
struct VarSpec {
  int channels = 0;
  int lag_order = 0;
  std::vector<Eigen::MatrixXd> coeffs;
  Eigen::MatrixXd noise_cov;
  std::uint64_t seed = 0;
};

/// Validated constructor: checks shapes, noise_cov symmetric positive
/// definite, and stability (companion-matrix spectral radius < 1).
VarSpec make_var_spec(std::vector<Eigen::MatrixXd> coeffs, Eigen::MatrixXd noise_cov,
                      std::uint64_t seed);

double companion_spectral_radius(const VarSpec& spec);

/// Generate `samples` rows after discarding `burn_in` (>= lag order) rows.
/// The first p rows are seeded with pure noise. Deterministic per seed.
TimeSeriesFrame generate(const VarSpec& spec, long samples, long burn_in);

enum class CaseStudy { I, II };

struct ScenarioPattern {
  std::string label;
  bool nominal = false;
  std::vector<std::pair<int, int>> edges;  // (from, to), lag-1 causal links
  VarSpec spec;
};

/// A family of VAR processes over one vertex set: some nominal operating
/// modes plus anomalous variants that only delete causal links.
struct ScenarioSuite {
  std::string name;
  int channels = 5;
  int lag_order = 1;
  double coupling_strength = 0.35;
  double self_coefficient = 0.4;
  std::uint64_t base_seed = 0;
  long samples = 20000;
  long burn_in = 500;
  std::vector<ScenarioPattern> patterns;
};

/// Canonical five-vertex suites.
/// Case I: one nominal hierarchical graph plus five anomalies, each the
/// failure of one vertex (all links touching it removed).
/// Case II: three nominal operating modes plus five anomalies, each one
/// nominal mode with a single causal link removed.
ScenarioSuite build_case_suite(CaseStudy case_study, double coupling_strength = 0.35);

/// Scenario file round trip (JSON text).
ScenarioSuite suite_from_json(const std::string& json_text);
std::string suite_to_json(const ScenarioSuite& suite);

}  // namespace stpn
