#ifndef EPICTRL_RL_NETWORK_HPP
#define EPICTRL_RL_NETWORK_HPP

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "epictrl/env/mdp.hpp"

namespace epictrl::rl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Encoded environment state as seen by the action-value network:
/// time-varying features over the last K days plus static proportions.
struct Observation {
    MatrixXd history; // 4 x K, columns oldest -> newest, zero-padded on the left
    VectorXd statics; // 3: (s_prop, scaled i_prop, r_prop)
};

/// Feature scaling applied when encoding an EnvState.
Observation encode_state(const env::EnvState& state, std::size_t history_k);

/// One learnable tensor with its Adam moment estimates.
struct Param {
    MatrixXd value;
    MatrixXd m;
    MatrixXd v;

    void init(Eigen::Index rows, Eigen::Index cols, double scale, std::mt19937_64& rng);
    void init_zero(Eigen::Index rows, Eigen::Index cols);
    void adam_step(const MatrixXd& grad, double lr, std::size_t t);
};

struct DenseLayer {
    Param w; // out x in
    Param b; // out x 1

    void init(Eigen::Index in, Eigen::Index out, std::mt19937_64& rng);
    MatrixXd forward(const MatrixXd& x) const; // x: in x B
};

/// Single-layer LSTM over fixed-length sequences; only the final hidden
/// state is consumed downstream.
struct LstmLayer {
    Param wx; // 4H x F, gate order i, f, g, o
    Param wh; // 4H x H
    Param b;  // 4H x 1

    Eigen::Index hidden = 0;
    Eigen::Index features = 0;

    void init(Eigen::Index features_, Eigen::Index hidden_, std::mt19937_64& rng);
};

struct QNetworkConfig {
    std::size_t history_k = 30;
    Eigen::Index history_hidden = 64;
    Eigen::Index static_hidden = 32;
    Eigen::Index head_hidden = 64;
    int actions = 7;
};

/// Two-branch action-value network: LSTM over the K-day history, dense
/// encoder for static proportions, concatenated into a dense head that
/// emits one value per action.
class QNetwork {
public:
    QNetwork(const QNetworkConfig& cfg, std::uint64_t seed);

    /// Action values, actions x batch. Throws ModelHealthError on non-finite
    /// outputs.
    MatrixXd forward(const std::vector<Observation>& batch) const;

    /// One Adam update of Huber(delta=1) loss between Q(state, action) and
    /// the supplied targets. Returns the batch-mean loss.
    double train_step(const std::vector<Observation>& batch,
                      const std::vector<int>& actions, const VectorXd& targets,
                      double learning_rate);

    void copy_weights_from(const QNetwork& other);

    const QNetworkConfig& config() const { return cfg_; }

    std::string to_json_text() const;
    static QNetwork from_json_text(const std::string& text);

private:
    QNetworkConfig cfg_;
    LstmLayer lstm_;
    DenseLayer static_enc_;
    DenseLayer head1_;
    DenseLayer head2_;
    std::size_t adam_t_ = 0;

    struct ForwardCache;
    MatrixXd forward_impl(const std::vector<Observation>& batch, ForwardCache* cache) const;
};

/// Plain fully-connected action-value net over vector observations. Used to
/// validate the learning update on small reference problems.
class MlpQNetwork {
public:
    MlpQNetwork(Eigen::Index input, Eigen::Index hidden, int actions, std::uint64_t seed);

    MatrixXd forward(const std::vector<VectorXd>& batch) const;
    double train_step(const std::vector<VectorXd>& batch, const std::vector<int>& actions,
                      const VectorXd& targets, double learning_rate);
    void copy_weights_from(const MlpQNetwork& other);

private:
    DenseLayer l1_;
    DenseLayer l2_;
    int actions_ = 0;
    std::size_t adam_t_ = 0;
};

} // namespace epictrl::rl

#endif
