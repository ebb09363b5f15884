#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "stpn/errors.hpp"
#include "stpn/rbm.hpp"

using namespace stpn;

namespace {

RbmModel random_model(std::mt19937& rng, int n_visible, int n_hidden, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  RbmModel m;
  m.weights.resize(n_hidden, n_visible);
  for (int j = 0; j < n_hidden; ++j) {
    for (int i = 0; i < n_visible; ++i) m.weights(j, i) = g(rng);
  }
  m.visible_bias.resize(n_visible);
  m.hidden_bias.resize(n_hidden);
  for (int i = 0; i < n_visible; ++i) m.visible_bias(i) = g(rng);
  for (int j = 0; j < n_hidden; ++j) m.hidden_bias(j) = g(rng);
  return m;
}

Eigen::VectorXd random_bits(std::mt19937& rng, int n) {
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = coin(rng) ? 1.0 : 0.0;
  return v;
}

Eigen::VectorXd bits_of(std::uint32_t pattern, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = (pattern >> i) & 1u;
  return v;
}

// Exact log-likelihood of a corpus under an enumerable model.
double exact_log_likelihood(const RbmModel& model, const Eigen::MatrixXd& data) {
  const double log_z = std::log(partition_function(model));
  double acc = 0.0;
  for (long r = 0; r < data.rows(); ++r) {
    acc += -free_energy(model, data.row(r).transpose()) - log_z;
  }
  return acc;
}

}  // namespace

TEST_CASE("energy") {
  std::mt19937 rng(61);
  SUBCASE("all-zero configuration has zero energy") {
    const RbmModel m = random_model(rng, 4, 3);
    CHECK(energy(m, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(3)) == doctest::Approx(0.0));
  }
  SUBCASE("bias-only model") {
    RbmModel m;
    m.weights = Eigen::MatrixXd::Zero(3, 6);
    m.visible_bias = Eigen::VectorXd::Ones(6);
    m.hidden_bias = Eigen::VectorXd::Zero(3);
    CHECK(energy(m, Eigen::VectorXd::Ones(6), Eigen::VectorXd::Zero(3)) == doctest::Approx(-6.0));
  }
  SUBCASE("matches a naive triple loop") {
    for (int rep = 0; rep < 20; ++rep) {
      const RbmModel m = random_model(rng, 5, 4);
      const Eigen::VectorXd v = random_bits(rng, 5);
      const Eigen::VectorXd h = random_bits(rng, 4);
      double e = 0.0;
      for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < 5; ++i) e -= h(j) * m.weights(j, i) * v(i);
      }
      for (int i = 0; i < 5; ++i) e -= m.visible_bias(i) * v(i);
      for (int j = 0; j < 4; ++j) e -= m.hidden_bias(j) * h(j);
      CHECK(energy(m, v, h) == doctest::Approx(e).epsilon(1e-12));
    }
  }
  SUBCASE("dimension mismatch") {
    const RbmModel m = random_model(rng, 4, 3);
    CHECK_THROWS_AS(energy(m, Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(3)),
                    ValidationError);
    CHECK_THROWS_AS(energy(m, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(2)),
                    ValidationError);
  }
}

TEST_CASE("free_energy") {
  std::mt19937 rng(67);
  SUBCASE("zero parameters: every hidden unit contributes log 2") {
    RbmModel m;
    m.weights = Eigen::MatrixXd::Zero(5, 3);
    m.visible_bias = Eigen::VectorXd::Zero(3);
    m.hidden_bias = Eigen::VectorXd::Zero(5);
    CHECK(free_energy(m, Eigen::VectorXd::Ones(3)) == doctest::Approx(-5.0 * std::log(2.0)));
  }
  SUBCASE("matches hidden-state enumeration on random models") {
    for (int rep = 0; rep < 30; ++rep) {
      std::uniform_int_distribution<int> nh(1, 12);
      const RbmModel m = random_model(rng, 6, nh(rng));
      const Eigen::VectorXd v = random_bits(rng, 6);
      const double exact = oracle::enumerated_free_energy(m, v);
      const double got = free_energy(m, v);
      CHECK(std::abs(got - exact) <= 1e-9 * std::max(1.0, std::abs(exact)));
    }
  }
  SUBCASE("at zero weights a hidden-bias shift moves F by a v-independent amount") {
    const double beta = 0.3, shift = 1.7;
    const int n_hidden = 4;
    RbmModel m;
    m.weights = Eigen::MatrixXd::Zero(n_hidden, 3);
    m.visible_bias = Eigen::VectorXd::Zero(3);
    m.hidden_bias = Eigen::VectorXd::Constant(n_hidden, beta);
    RbmModel shifted = m;
    shifted.hidden_bias.array() += shift;
    const double expected_delta =
        -n_hidden * (std::log1p(std::exp(beta + shift)) - std::log1p(std::exp(beta)));
    for (std::uint32_t p = 0; p < 8; ++p) {
      const Eigen::VectorXd v = bits_of(p, 3);
      CHECK(free_energy(shifted, v) - free_energy(m, v) ==
            doctest::Approx(expected_delta).epsilon(1e-12));
    }
  }
  SUBCASE("finite for parameter magnitudes up to 1e4") {
    RbmModel m;
    m.weights = Eigen::MatrixXd::Constant(6, 6, 1e4);
    m.visible_bias = Eigen::VectorXd::Constant(6, -1e4);
    m.hidden_bias = Eigen::VectorXd::Constant(6, 1e4);
    CHECK(std::isfinite(free_energy(m, Eigen::VectorXd::Ones(6))));
    m.weights.array() *= -1.0;
    CHECK(std::isfinite(free_energy(m, Eigen::VectorXd::Ones(6))));
  }
  SUBCASE("dimension mismatch") {
    const RbmModel m = random_model(rng, 4, 3);
    CHECK_THROWS_AS(free_energy(m, Eigen::VectorXd::Zero(3)), ValidationError);
  }
}

TEST_CASE("probabilities on enumerable models") {
  std::mt19937 rng(71);
  SUBCASE("all parameters zero: the four configurations are uniform") {
    RbmModel m;
    m.weights = Eigen::MatrixXd::Zero(1, 1);
    m.visible_bias = Eigen::VectorXd::Zero(1);
    m.hidden_bias = Eigen::VectorXd::Zero(1);
    const double z = partition_function(m);
    for (std::uint32_t vb = 0; vb < 2; ++vb) {
      for (std::uint32_t hb = 0; hb < 2; ++hb) {
        CHECK(probability_unnormalized(m, bits_of(vb, 1), bits_of(hb, 1)) / z ==
              doctest::Approx(0.25));
      }
    }
  }
  SUBCASE("probabilities over all configurations sum to one") {
    const RbmModel m = random_model(rng, 4, 3);
    const double z = partition_function(m);
    double total = 0.0;
    for (std::uint32_t vb = 0; vb < 16; ++vb) {
      for (std::uint32_t hb = 0; hb < 8; ++hb) {
        total += probability_unnormalized(m, bits_of(vb, 4), bits_of(hb, 3)) / z;
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("marginal over hidden states equals the free-energy Boltzmann weight") {
    const RbmModel m = random_model(rng, 4, 4);
    const double z = partition_function(m);
    double z_from_f = 0.0;
    for (std::uint32_t vb = 0; vb < 16; ++vb) {
      z_from_f += std::exp(-free_energy(m, bits_of(vb, 4)));
    }
    for (std::uint32_t vb = 0; vb < 16; ++vb) {
      const Eigen::VectorXd v = bits_of(vb, 4);
      double marginal = 0.0;
      for (std::uint32_t hb = 0; hb < 16; ++hb) {
        marginal += probability_unnormalized(m, v, bits_of(hb, 4)) / z;
      }
      CHECK(marginal == doctest::Approx(std::exp(-free_energy(m, v)) / z_from_f).epsilon(1e-9));
    }
  }
  SUBCASE("enumeration guard") {
    const RbmModel m = random_model(rng, 20, 20);
    CHECK_THROWS_AS(partition_function(m), ValidationError);
  }
}

TEST_CASE("train_rbm") {
  SUBCASE("identical corpus: the memorized vector beats its complement") {
    const int n = 12;
    Eigen::MatrixXd data(40, n);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = i % 3 == 0 ? 1.0 : 0.0;
    for (long r = 0; r < data.rows(); ++r) data.row(r) = v.transpose();
    TrainConfig cfg;
    cfg.rng_seed = 99;
    const RbmModel m = train_rbm(data, 8, cfg);
    const Eigen::VectorXd complement = Eigen::VectorXd::Ones(n) - v;
    CHECK(free_energy(m, v) < free_energy(m, complement));
  }
  SUBCASE("config validation") {
    Eigen::MatrixXd data = Eigen::MatrixXd::Zero(4, 3);
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(train_rbm(data, 2, cfg), ValidationError);
    cfg = TrainConfig{};
    CHECK_THROWS_AS(train_rbm(Eigen::MatrixXd(0, 3), 2, cfg), ValidationError);
    cfg.cd_steps = 0;
    CHECK_THROWS_AS(train_rbm(data, 2, cfg), ValidationError);
  }
  SUBCASE("same corpus, same seed: bit-identical parameters") {
    std::mt19937 rng(73);
    Eigen::MatrixXd data(30, 6);
    for (long r = 0; r < data.rows(); ++r) data.row(r) = random_bits(rng, 6).transpose();
    TrainConfig cfg;
    cfg.rng_seed = 1234;
    cfg.epochs = 50;
    const RbmModel a = train_rbm(data, 5, cfg);
    const RbmModel b = train_rbm(data, 5, cfg);
    CHECK(a.weights == b.weights);
    CHECK(a.visible_bias == b.visible_bias);
    CHECK(a.hidden_bias == b.hidden_bias);
  }
  SUBCASE("training lowers the corpus mean free energy on separable data in most runs") {
    std::mt19937 rng(79);
    const int n = 16;
    Eigen::MatrixXd data(60, n);
    std::bernoulli_distribution flip(0.05);
    for (long r = 0; r < data.rows(); ++r) {
      const double base = r % 2 == 0 ? 1.0 : 0.0;
      for (int i = 0; i < n; ++i) data(r, i) = flip(rng) ? 1.0 - base : base;
    }
    int improved = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      TrainConfig cfg;
      cfg.rng_seed = seed;
      cfg.epochs = 60;
      std::vector<double> trace;
      train_rbm(data, 12, cfg, &trace);
      REQUIRE(trace.size() == 60);
      if (trace.back() <= trace.front() + 1e-9) ++improved;
    }
    CHECK(improved >= 9);
  }
}

TEST_CASE("CD positive statistics match the exact likelihood gradient") {
  // With the negative phase replaced by exact enumeration, the gradient of
  // the log likelihood in W_ji is <v_i p(h_j|v)>_data - <v_i h_j>_model.
  // Compare that to central finite differences of the exact log likelihood.
  std::mt19937 rng(83);
  const int nv = 6, nh = 5;
  RbmModel model = random_model(rng, nv, nh, 0.4);
  Eigen::MatrixXd data(12, nv);
  for (long r = 0; r < data.rows(); ++r) data.row(r) = random_bits(rng, nv).transpose();

  // Positive phase from data.
  Eigen::MatrixXd positive = Eigen::MatrixXd::Zero(nh, nv);
  for (long r = 0; r < data.rows(); ++r) {
    const Eigen::VectorXd v = data.row(r).transpose();
    positive += hidden_probabilities(model, v) * v.transpose();
  }
  positive /= static_cast<double>(data.rows());

  // Exact model expectation of v_i h_j by enumeration.
  const double z = partition_function(model);
  Eigen::MatrixXd negative = Eigen::MatrixXd::Zero(nh, nv);
  for (std::uint32_t vb = 0; vb < (1u << nv); ++vb) {
    const Eigen::VectorXd v = bits_of(vb, nv);
    for (std::uint32_t hb = 0; hb < (1u << nh); ++hb) {
      const Eigen::VectorXd h = bits_of(hb, nh);
      negative += (probability_unnormalized(model, v, h) / z) * (h * v.transpose());
    }
  }

  const double eps = 1e-5;
  for (int j = 0; j < nh; ++j) {
    for (int i = 0; i < nv; ++i) {
      RbmModel plus = model, minus = model;
      plus.weights(j, i) += eps;
      minus.weights(j, i) -= eps;
      const double fd = (exact_log_likelihood(plus, data) - exact_log_likelihood(minus, data)) /
                        (2.0 * eps * static_cast<double>(data.rows()));
      CHECK(std::abs(positive(j, i) - negative(j, i) - fd) <= 5e-3);
    }
  }
}
