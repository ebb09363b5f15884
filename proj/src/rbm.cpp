#include "stpn/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "stpn/errors.hpp"

namespace stpn {

namespace {

// Saturation-safe log(1 + e^x).
double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_visible(const RbmModel& model, const Eigen::VectorXd& v) {
  if (v.size() != model.n_visible()) {
    throw ValidationError("visible vector of size " + std::to_string(v.size()) +
                          ", model has " + std::to_string(model.n_visible()) + " visible units");
  }
}

void check_hidden(const RbmModel& model, const Eigen::VectorXd& h) {
  if (h.size() != model.n_hidden()) {
    throw ValidationError("hidden vector of size " + std::to_string(h.size()) + ", model has " +
                          std::to_string(model.n_hidden()) + " hidden units");
  }
}

}  // namespace

double energy(const RbmModel& model, const Eigen::VectorXd& v, const Eigen::VectorXd& h) {
  check_visible(model, v);
  check_hidden(model, h);
  return -h.dot(model.weights * v) - model.visible_bias.dot(v) - model.hidden_bias.dot(h);
}

double free_energy(const RbmModel& model, const Eigen::VectorXd& v) {
  check_visible(model, v);
  const Eigen::VectorXd act = model.hidden_bias + model.weights * v;
  double hidden_term = 0.0;
  for (long j = 0; j < act.size(); ++j) hidden_term += softplus(act(j));
  return -model.visible_bias.dot(v) - hidden_term;
}

Eigen::VectorXd hidden_probabilities(const RbmModel& model, const Eigen::VectorXd& v) {
  check_visible(model, v);
  return (model.hidden_bias + model.weights * v).unaryExpr([](double x) { return sigmoid(x); });
}

double probability_unnormalized(const RbmModel& model, const Eigen::VectorXd& v,
                                const Eigen::VectorXd& h) {
  return std::exp(-energy(model, v, h));
}

double partition_function(const RbmModel& model) {
  const int nv = model.n_visible();
  const int nh = model.n_hidden();
  if (nv + nh > 24) {
    throw ValidationError("partition function enumeration limited to 24 total units, got " +
                          std::to_string(nv + nh));
  }
  Eigen::VectorXd v(nv), h(nh);
  double z = 0.0;
  for (std::uint32_t vb = 0; vb < (1u << nv); ++vb) {
    for (int i = 0; i < nv; ++i) v(i) = (vb >> i) & 1u;
    for (std::uint32_t hb = 0; hb < (1u << nh); ++hb) {
      for (int j = 0; j < nh; ++j) h(j) = (hb >> j) & 1u;
      z += std::exp(-energy(model, v, h));
    }
  }
  return z;
}

RbmModel train_rbm(const Eigen::MatrixXd& data, int n_hidden, const TrainConfig& cfg,
                   std::vector<double>* epoch_mean_free_energy) {
  const long n_examples = data.rows();
  const int n_visible = static_cast<int>(data.cols());
  if (n_examples == 0) throw ValidationError("RBM training corpus is empty");
  if (n_hidden < 1) throw ValidationError("n_hidden must be at least 1");
  if (cfg.epochs < 1) throw ValidationError("epochs must be at least 1");
  if (cfg.cd_steps < 1) throw ValidationError("cd_steps must be at least 1");
  if (cfg.minibatch_size < 1) throw ValidationError("minibatch_size must be at least 1");
  if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");

  std::mt19937_64 rng(cfg.rng_seed);
  std::normal_distribution<double> init(0.0, cfg.init_weight_scale);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  RbmModel model;
  model.weights.resize(n_hidden, n_visible);
  for (int j = 0; j < n_hidden; ++j) {
    for (int i = 0; i < n_visible; ++i) model.weights(j, i) = init(rng);
  }
  model.visible_bias = Eigen::VectorXd::Zero(n_visible);
  model.hidden_bias = Eigen::VectorXd::Zero(n_hidden);

  if (cfg.weight_decay < 0.0) throw ValidationError("weight_decay must be non-negative");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) {
    throw ValidationError("momentum must lie in [0, 1)");
  }

  std::vector<long> order(static_cast<std::size_t>(n_examples));
  std::iota(order.begin(), order.end(), 0L);

  Eigen::MatrixXd w_vel = Eigen::MatrixXd::Zero(n_hidden, n_visible);
  Eigen::VectorXd vb_vel = Eigen::VectorXd::Zero(n_visible);
  Eigen::VectorXd hb_vel = Eigen::VectorXd::Zero(n_hidden);

  const auto bernoulli = [&](const Eigen::MatrixXd& probs) {
    Eigen::MatrixXd s(probs.rows(), probs.cols());
    for (long r = 0; r < probs.rows(); ++r) {
      for (long c = 0; c < probs.cols(); ++c) s(r, c) = unit(rng) < probs(r, c) ? 1.0 : 0.0;
    }
    return s;
  };
  const auto sigmoid_all = [](Eigen::MatrixXd m) {
    return m.unaryExpr([](double x) { return sigmoid(x); });
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (long start = 0; start < n_examples; start += cfg.minibatch_size) {
      const long count = std::min<long>(cfg.minibatch_size, n_examples - start);
      Eigen::MatrixXd v0(count, n_visible);
      for (long r = 0; r < count; ++r) {
        v0.row(r) = data.row(order[static_cast<std::size_t>(start + r)]);
      }

      // Positive phase uses hidden probabilities; the chain propagates
      // sampled hidden states and probabilistic visible reconstructions.
      Eigen::MatrixXd ph0 = sigmoid_all((v0 * model.weights.transpose()).rowwise() +
                                        model.hidden_bias.transpose());
      Eigen::MatrixXd h = bernoulli(ph0);
      Eigen::MatrixXd vk;
      Eigen::MatrixXd phk;
      for (int step = 0; step < cfg.cd_steps; ++step) {
        vk = sigmoid_all((h * model.weights).rowwise() + model.visible_bias.transpose());
        phk = sigmoid_all((vk * model.weights.transpose()).rowwise() +
                          model.hidden_bias.transpose());
        if (step + 1 < cfg.cd_steps) h = bernoulli(phk);
      }

      const double scale = cfg.learning_rate / static_cast<double>(count);
      w_vel = cfg.momentum * w_vel + scale * (ph0.transpose() * v0 - phk.transpose() * vk) -
              cfg.learning_rate * cfg.weight_decay * model.weights;
      vb_vel = cfg.momentum * vb_vel + scale * (v0 - vk).colwise().sum().transpose();
      hb_vel = cfg.momentum * hb_vel + scale * (ph0 - phk).colwise().sum().transpose();
      model.weights += w_vel;
      model.visible_bias += vb_vel;
      model.hidden_bias += hb_vel;
    }
    if (epoch_mean_free_energy) {
      double acc = 0.0;
      for (long r = 0; r < n_examples; ++r) {
        acc += free_energy(model, data.row(r).transpose());
      }
      epoch_mean_free_energy->push_back(acc / static_cast<double>(n_examples));
    }
  }
  return model;
}

}  // namespace stpn
