#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace stpn {

/// Restricted Boltzmann machine over binary visible/hidden units.
/// Energy of a joint configuration:
///   E(v, h) = -h^T W v - b_visible^T v - b_hidden^T h.
struct RbmModel {
  Eigen::MatrixXd weights;       // n_hidden x n_visible
  Eigen::VectorXd visible_bias;  // n_visible
  Eigen::VectorXd hidden_bias;   // n_hidden

  int n_visible() const { return static_cast<int>(visible_bias.size()); }
  int n_hidden() const { return static_cast<int>(hidden_bias.size()); }
};

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 200;
  int minibatch_size = 32;
  int cd_steps = 1;
  std::uint64_t rng_seed = 1;
  double init_weight_scale = 0.01;
  double weight_decay = 0.0;  // L2 penalty on weights per update
  double momentum = 0.0;
};

double energy(const RbmModel& model, const Eigen::VectorXd& v, const Eigen::VectorXd& h);

/// Free energy of a visible vector, all hidden configurations marginalized:
///   F(v) = -b_visible^T v - sum_j softplus(b_hidden_j + (W v)_j)
/// with a saturation-safe softplus, so e^{-F(v)} = sum_h e^{-E(v,h)}.
double free_energy(const RbmModel& model, const Eigen::VectorXd& v);

/// p(h_j = 1 | v), elementwise sigmoid of b_hidden + W v.
Eigen::VectorXd hidden_probabilities(const RbmModel& model, const Eigen::VectorXd& v);

/// Unnormalized probability e^{-E(v,h)}. Pairs with partition_function as a
/// small-model oracle; not a production scoring path.
double probability_unnormalized(const RbmModel& model, const Eigen::VectorXd& v,
                                const Eigen::VectorXd& h);

/// Exact partition function by enumerating all 2^(n_visible + n_hidden)
/// configurations; refuses models with more than 24 total units.
double partition_function(const RbmModel& model);

/// Train by CD-k contrastive divergence on a corpus of binary row vectors.
/// Deterministic for a fixed seed. When epoch_mean_free_energy is given it
/// receives the corpus mean free energy after every epoch.
RbmModel train_rbm(const Eigen::MatrixXd& data, int n_hidden, const TrainConfig& cfg,
                   std::vector<double>* epoch_mean_free_energy = nullptr);

}  // namespace stpn
