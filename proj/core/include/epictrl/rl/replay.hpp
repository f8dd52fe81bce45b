#ifndef EPICTRL_RL_REPLAY_HPP
#define EPICTRL_RL_REPLAY_HPP

#include <cstddef>
#include <random>
#include <vector>

#include "epictrl/common/errors.hpp"

namespace epictrl::rl {

template <class Obs>
struct Transition {
    Obs state;
    int action = 0; // 0..6
    double reward = 0.0;
    Obs next_state;
    bool done = false;
};

/// Fixed-capacity ring of transitions with uniform batch sampling
/// (without replacement within a batch).
template <class Obs>
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity)
    {
        if (capacity_ == 0) {
            throw DomainError("replay capacity must be positive");
        }
        items_.reserve(capacity_);
    }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }

    void push(Transition<Obs> t)
    {
        if (items_.size() < capacity_) {
            items_.push_back(std::move(t));
        } else {
            items_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    /// Indices of a uniform sample; distinct within the batch.
    std::vector<std::size_t> sample_indices(std::size_t batch, std::mt19937_64& rng) const
    {
        if (batch > items_.size()) {
            throw DomainError("batch larger than buffer");
        }
        // Partial Fisher-Yates over an index vector.
        std::vector<std::size_t> idx(items_.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            idx[k] = k;
        }
        for (std::size_t k = 0; k < batch; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
            std::swap(idx[k], idx[pick(rng)]);
        }
        idx.resize(batch);
        return idx;
    }

    const Transition<Obs>& operator[](std::size_t k) const { return items_[k]; }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition<Obs>> items_;
};

} // namespace epictrl::rl

#endif
