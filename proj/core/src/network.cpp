#include "epictrl/rl/network.hpp"

#include <cmath>

#include <json.hpp>

#include "epictrl/common/errors.hpp"

namespace epictrl::rl {

namespace {

using nlohmann::json;

MatrixXd sigmoid(const MatrixXd& x)
{
    return ((-x.array()).exp() + 1.0).inverse().matrix();
}

MatrixXd relu(const MatrixXd& x)
{
    return x.cwiseMax(0.0);
}

json matrix_to_json(const MatrixXd& m)
{
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> data(m.data(), m.data() + m.size());
    j["data"] = data;
    return j;
}

MatrixXd matrix_from_json(const json& j)
{
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw ParseError("checkpoint matrix size mismatch");
    }
    return Eigen::Map<const MatrixXd>(data.data(), rows, cols);
}

} // namespace

Observation encode_state(const env::EnvState& state, std::size_t history_k)
{
    Observation obs;
    obs.history = MatrixXd::Zero(4, static_cast<Eigen::Index>(history_k));
    const std::size_t len = state.history.size();
    const std::size_t skip = len > history_k ? len - history_k : 0;
    const std::size_t used = len - skip;
    const std::size_t pad = history_k - used;
    for (std::size_t k = 0; k < used; ++k) {
        const auto& e = state.history[skip + k];
        const auto col = static_cast<Eigen::Index>(pad + k);
        obs.history(0, col) = e.stringency / 100.0;
        obs.history(1, col) = e.norm_gdp;
        obs.history(2, col) = e.r_eff / 4.0;
        obs.history(3, col) = e.action_delta / 10.0;
    }
    obs.statics = VectorXd(3);
    obs.statics << state.s_prop, state.i_prop * 100.0, state.r_prop;
    return obs;
}

void Param::init(Eigen::Index rows, Eigen::Index cols, double scale, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> dist(-scale, scale);
    value = MatrixXd::NullaryExpr(rows, cols, [&]() { return dist(rng); });
    m = MatrixXd::Zero(rows, cols);
    v = MatrixXd::Zero(rows, cols);
}

void Param::init_zero(Eigen::Index rows, Eigen::Index cols)
{
    value = MatrixXd::Zero(rows, cols);
    m = MatrixXd::Zero(rows, cols);
    v = MatrixXd::Zero(rows, cols);
}

void Param::adam_step(const MatrixXd& grad, double lr, std::size_t t)
{
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    m = kBeta1 * m + (1.0 - kBeta1) * grad;
    v = kBeta2 * v.array().matrix() + (1.0 - kBeta2) * grad.array().square().matrix();
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
    value.array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + kEps);
}

void DenseLayer::init(Eigen::Index in, Eigen::Index out, std::mt19937_64& rng)
{
    const double scale = std::sqrt(6.0 / static_cast<double>(in + out));
    w.init(out, in, scale, rng);
    b.init_zero(out, 1);
}

MatrixXd DenseLayer::forward(const MatrixXd& x) const
{
    return (w.value * x).colwise() + VectorXd(b.value.col(0));
}

void LstmLayer::init(Eigen::Index features_, Eigen::Index hidden_, std::mt19937_64& rng)
{
    features = features_;
    hidden = hidden_;
    const double sx = std::sqrt(6.0 / static_cast<double>(features + hidden));
    const double sh = std::sqrt(6.0 / static_cast<double>(hidden + hidden));
    wx.init(4 * hidden, features, sx, rng);
    wh.init(4 * hidden, hidden, sh, rng);
    b.init_zero(4 * hidden, 1);
    // Forget-gate bias starts at 1 so early training does not wipe the cell.
    b.value.block(hidden, 0, hidden, 1).setOnes();
}

struct QNetwork::ForwardCache {
    std::vector<MatrixXd> x;     // per t: F x B
    std::vector<MatrixXd> gi, gf, gg, go;
    std::vector<MatrixXd> c, tanh_c, h;
    MatrixXd statics;            // 3 x B
    MatrixXd zs, stat_act;       // static branch
    MatrixXd concat;             // (H + S) x B
    MatrixXd z1, act1;           // head hidden
    MatrixXd q;                  // actions x B
};

QNetwork::QNetwork(const QNetworkConfig& cfg, std::uint64_t seed) : cfg_(cfg)
{
    std::mt19937_64 rng(seed);
    lstm_.init(4, cfg_.history_hidden, rng);
    static_enc_.init(3, cfg_.static_hidden, rng);
    head1_.init(cfg_.history_hidden + cfg_.static_hidden, cfg_.head_hidden, rng);
    head2_.init(cfg_.head_hidden, cfg_.actions, rng);
}

MatrixXd QNetwork::forward_impl(const std::vector<Observation>& batch,
                                ForwardCache* cache) const
{
    const auto b = static_cast<Eigen::Index>(batch.size());
    const auto k = static_cast<Eigen::Index>(cfg_.history_k);
    const Eigen::Index h = lstm_.hidden;

    MatrixXd hidden = MatrixXd::Zero(h, b);
    MatrixXd cell = MatrixXd::Zero(h, b);
    if (cache) {
        cache->x.resize(static_cast<std::size_t>(k));
        cache->gi.resize(static_cast<std::size_t>(k));
        cache->gf.resize(static_cast<std::size_t>(k));
        cache->gg.resize(static_cast<std::size_t>(k));
        cache->go.resize(static_cast<std::size_t>(k));
        cache->c.resize(static_cast<std::size_t>(k));
        cache->tanh_c.resize(static_cast<std::size_t>(k));
        cache->h.resize(static_cast<std::size_t>(k));
    }
    for (Eigen::Index t = 0; t < k; ++t) {
        MatrixXd x(4, b);
        for (Eigen::Index col = 0; col < b; ++col) {
            x.col(col) = batch[static_cast<std::size_t>(col)].history.col(t);
        }
        MatrixXd z = lstm_.wx.value * x + lstm_.wh.value * hidden;
        z.colwise() += VectorXd(lstm_.b.value.col(0));
        const MatrixXd gi = sigmoid(z.topRows(h));
        const MatrixXd gf = sigmoid(z.middleRows(h, h));
        const MatrixXd gg = z.middleRows(2 * h, h).array().tanh().matrix();
        const MatrixXd go = sigmoid(z.bottomRows(h));
        cell = gf.cwiseProduct(cell) + gi.cwiseProduct(gg);
        const MatrixXd tanh_c = cell.array().tanh().matrix();
        hidden = go.cwiseProduct(tanh_c);
        if (cache) {
            const auto ts = static_cast<std::size_t>(t);
            cache->x[ts] = std::move(x);
            cache->gi[ts] = gi;
            cache->gf[ts] = gf;
            cache->gg[ts] = gg;
            cache->go[ts] = go;
            cache->c[ts] = cell;
            cache->tanh_c[ts] = tanh_c;
            cache->h[ts] = hidden;
        }
    }

    MatrixXd statics(3, b);
    for (Eigen::Index col = 0; col < b; ++col) {
        statics.col(col) = batch[static_cast<std::size_t>(col)].statics;
    }
    const MatrixXd zs = static_enc_.forward(statics);
    const MatrixXd stat_act = relu(zs);

    MatrixXd concat(lstm_.hidden + cfg_.static_hidden, b);
    concat.topRows(lstm_.hidden) = hidden;
    concat.bottomRows(cfg_.static_hidden) = stat_act;

    const MatrixXd z1 = head1_.forward(concat);
    const MatrixXd act1 = relu(z1);
    MatrixXd q = head2_.forward(act1);

    if (!q.allFinite()) {
        throw ModelHealthError("non-finite action values");
    }
    if (cache) {
        cache->statics = std::move(statics);
        cache->zs = zs;
        cache->stat_act = stat_act;
        cache->concat = std::move(concat);
        cache->z1 = z1;
        cache->act1 = act1;
        cache->q = q;
    }
    return q;
}

MatrixXd QNetwork::forward(const std::vector<Observation>& batch) const
{
    return forward_impl(batch, nullptr);
}

double QNetwork::train_step(const std::vector<Observation>& batch,
                            const std::vector<int>& actions, const VectorXd& targets,
                            double learning_rate)
{
    const auto b = static_cast<Eigen::Index>(batch.size());
    ForwardCache cache;
    forward_impl(batch, &cache);

    // Huber(delta=1) on the selected action values.
    double loss = 0.0;
    MatrixXd dq = MatrixXd::Zero(cfg_.actions, b);
    for (Eigen::Index col = 0; col < b; ++col) {
        const int a = actions[static_cast<std::size_t>(col)];
        const double e = cache.q(a, col) - targets(col);
        loss += std::abs(e) <= 1.0 ? 0.5 * e * e : std::abs(e) - 0.5;
        dq(a, col) = std::clamp(e, -1.0, 1.0) / static_cast<double>(b);
    }
    loss /= static_cast<double>(b);

    // Head backward.
    const MatrixXd d_act1 = head2_.w.value.transpose() * dq;
    const MatrixXd dz1 =
        d_act1.cwiseProduct((cache.z1.array() > 0.0).cast<double>().matrix());
    const MatrixXd d_concat = head1_.w.value.transpose() * dz1;

    const Eigen::Index h = lstm_.hidden;
    MatrixXd dh = d_concat.topRows(h);
    const MatrixXd d_stat_act = d_concat.bottomRows(cfg_.static_hidden);
    const MatrixXd dzs =
        d_stat_act.cwiseProduct((cache.zs.array() > 0.0).cast<double>().matrix());

    // LSTM backward through time.
    const auto k = static_cast<std::size_t>(cfg_.history_k);
    MatrixXd dwx = MatrixXd::Zero(lstm_.wx.value.rows(), lstm_.wx.value.cols());
    MatrixXd dwh = MatrixXd::Zero(lstm_.wh.value.rows(), lstm_.wh.value.cols());
    MatrixXd dbl = MatrixXd::Zero(lstm_.b.value.rows(), 1);
    MatrixXd dc = MatrixXd::Zero(h, b);
    for (std::size_t t = k; t-- > 0;) {
        const MatrixXd& gi = cache.gi[t];
        const MatrixXd& gf = cache.gf[t];
        const MatrixXd& gg = cache.gg[t];
        const MatrixXd& go = cache.go[t];
        const MatrixXd& tanh_c = cache.tanh_c[t];
        const MatrixXd c_prev =
            t == 0 ? MatrixXd::Zero(h, b) : cache.c[t - 1];
        const MatrixXd h_prev =
            t == 0 ? MatrixXd::Zero(h, b) : cache.h[t - 1];

        const MatrixXd d_go = dh.cwiseProduct(tanh_c);
        dc += dh.cwiseProduct(go).cwiseProduct(
            (1.0 - tanh_c.array().square()).matrix());
        const MatrixXd d_gi = dc.cwiseProduct(gg);
        const MatrixXd d_gg = dc.cwiseProduct(gi);
        const MatrixXd d_gf = dc.cwiseProduct(c_prev);

        MatrixXd dz(4 * h, b);
        dz.topRows(h) = d_gi.cwiseProduct(gi).cwiseProduct((1.0 - gi.array()).matrix());
        dz.middleRows(h, h) =
            d_gf.cwiseProduct(gf).cwiseProduct((1.0 - gf.array()).matrix());
        dz.middleRows(2 * h, h) =
            d_gg.cwiseProduct((1.0 - gg.array().square()).matrix());
        dz.bottomRows(h) =
            d_go.cwiseProduct(go).cwiseProduct((1.0 - go.array()).matrix());

        dwx += dz * cache.x[t].transpose();
        dwh += dz * h_prev.transpose();
        dbl += dz.rowwise().sum();

        dh = lstm_.wh.value.transpose() * dz;
        dc = dc.cwiseProduct(gf);
    }

    ++adam_t_;
    head2_.w.adam_step(dq * cache.act1.transpose(), learning_rate, adam_t_);
    head2_.b.adam_step(dq.rowwise().sum(), learning_rate, adam_t_);
    head1_.w.adam_step(dz1 * cache.concat.transpose(), learning_rate, adam_t_);
    head1_.b.adam_step(dz1.rowwise().sum(), learning_rate, adam_t_);
    static_enc_.w.adam_step(dzs * cache.statics.transpose(), learning_rate, adam_t_);
    static_enc_.b.adam_step(dzs.rowwise().sum(), learning_rate, adam_t_);
    lstm_.wx.adam_step(dwx, learning_rate, adam_t_);
    lstm_.wh.adam_step(dwh, learning_rate, adam_t_);
    lstm_.b.adam_step(dbl, learning_rate, adam_t_);

    return loss;
}

void QNetwork::copy_weights_from(const QNetwork& other)
{
    lstm_.wx.value = other.lstm_.wx.value;
    lstm_.wh.value = other.lstm_.wh.value;
    lstm_.b.value = other.lstm_.b.value;
    static_enc_.w.value = other.static_enc_.w.value;
    static_enc_.b.value = other.static_enc_.b.value;
    head1_.w.value = other.head1_.w.value;
    head1_.b.value = other.head1_.b.value;
    head2_.w.value = other.head2_.w.value;
    head2_.b.value = other.head2_.b.value;
}

std::string QNetwork::to_json_text() const
{
    json j;
    j["version"] = 1;
    j["config"] = {{"history_k", cfg_.history_k},
                   {"history_hidden", cfg_.history_hidden},
                   {"static_hidden", cfg_.static_hidden},
                   {"head_hidden", cfg_.head_hidden},
                   {"actions", cfg_.actions}};
    j["lstm_wx"] = matrix_to_json(lstm_.wx.value);
    j["lstm_wh"] = matrix_to_json(lstm_.wh.value);
    j["lstm_b"] = matrix_to_json(lstm_.b.value);
    j["static_w"] = matrix_to_json(static_enc_.w.value);
    j["static_b"] = matrix_to_json(static_enc_.b.value);
    j["head1_w"] = matrix_to_json(head1_.w.value);
    j["head1_b"] = matrix_to_json(head1_.b.value);
    j["head2_w"] = matrix_to_json(head2_.w.value);
    j["head2_b"] = matrix_to_json(head2_.b.value);
    return j.dump();
}

QNetwork QNetwork::from_json_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid checkpoint: ") + e.what());
    }
    if (j.value("version", 0) != 1) {
        throw ParseError("unsupported checkpoint version");
    }
    QNetworkConfig cfg;
    const auto& c = j.at("config");
    cfg.history_k = c.at("history_k").get<std::size_t>();
    cfg.history_hidden = c.at("history_hidden").get<Eigen::Index>();
    cfg.static_hidden = c.at("static_hidden").get<Eigen::Index>();
    cfg.head_hidden = c.at("head_hidden").get<Eigen::Index>();
    cfg.actions = c.at("actions").get<int>();
    QNetwork net(cfg, 0);
    net.lstm_.wx.value = matrix_from_json(j.at("lstm_wx"));
    net.lstm_.wh.value = matrix_from_json(j.at("lstm_wh"));
    net.lstm_.b.value = matrix_from_json(j.at("lstm_b"));
    net.static_enc_.w.value = matrix_from_json(j.at("static_w"));
    net.static_enc_.b.value = matrix_from_json(j.at("static_b"));
    net.head1_.w.value = matrix_from_json(j.at("head1_w"));
    net.head1_.b.value = matrix_from_json(j.at("head1_b"));
    net.head2_.w.value = matrix_from_json(j.at("head2_w"));
    net.head2_.b.value = matrix_from_json(j.at("head2_b"));
    return net;
}

MlpQNetwork::MlpQNetwork(Eigen::Index input, Eigen::Index hidden, int actions,
                         std::uint64_t seed)
    : actions_(actions)
{
    std::mt19937_64 rng(seed);
    l1_.init(input, hidden, rng);
    l2_.init(hidden, actions, rng);
}

MatrixXd MlpQNetwork::forward(const std::vector<VectorXd>& batch) const
{
    const auto b = static_cast<Eigen::Index>(batch.size());
    MatrixXd x(batch[0].size(), b);
    for (Eigen::Index col = 0; col < b; ++col) {
        x.col(col) = batch[static_cast<std::size_t>(col)];
    }
    const MatrixXd q = l2_.forward(relu(l1_.forward(x)));
    if (!q.allFinite()) {
        throw ModelHealthError("non-finite action values");
    }
    return q;
}

double MlpQNetwork::train_step(const std::vector<VectorXd>& batch,
                               const std::vector<int>& actions, const VectorXd& targets,
                               double learning_rate)
{
    const auto b = static_cast<Eigen::Index>(batch.size());
    MatrixXd x(batch[0].size(), b);
    for (Eigen::Index col = 0; col < b; ++col) {
        x.col(col) = batch[static_cast<std::size_t>(col)];
    }
    const MatrixXd z1 = l1_.forward(x);
    const MatrixXd a1 = relu(z1);
    const MatrixXd q = l2_.forward(a1);

    double loss = 0.0;
    MatrixXd dq = MatrixXd::Zero(actions_, b);
    for (Eigen::Index col = 0; col < b; ++col) {
        const int a = actions[static_cast<std::size_t>(col)];
        const double e = q(a, col) - targets(col);
        loss += std::abs(e) <= 1.0 ? 0.5 * e * e : std::abs(e) - 0.5;
        dq(a, col) = std::clamp(e, -1.0, 1.0) / static_cast<double>(b);
    }
    loss /= static_cast<double>(b);

    const MatrixXd da1 = l2_.w.value.transpose() * dq;
    const MatrixXd dz1 = da1.cwiseProduct((z1.array() > 0.0).cast<double>().matrix());

    ++adam_t_;
    l2_.w.adam_step(dq * a1.transpose(), learning_rate, adam_t_);
    l2_.b.adam_step(dq.rowwise().sum(), learning_rate, adam_t_);
    l1_.w.adam_step(dz1 * x.transpose(), learning_rate, adam_t_);
    l1_.b.adam_step(dz1.rowwise().sum(), learning_rate, adam_t_);
    return loss;
}

void MlpQNetwork::copy_weights_from(const MlpQNetwork& other)
{
    l1_.w.value = other.l1_.w.value;
    l1_.b.value = other.l1_.b.value;
    l2_.w.value = other.l2_.w.value;
    l2_.b.value = other.l2_.b.value;
}

} // namespace epictrl::rl
