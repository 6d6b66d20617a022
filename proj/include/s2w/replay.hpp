#pragma once

#include <cstdint>
#include <vector>

#include "s2w/grid.hpp"
#include "s2w/rng.hpp"
#include "s2w/tensor.hpp"

namespace s2w {

/// Observations are stored at float precision: a full buffer holds thousands
/// of them and the replay gradient signal does not need the last 29 bits.
struct CompactObs {
    int c = 0, h = 0, w = 0;
    std::vector<float> v;
};

CompactObs compress_obs(const Tensor& t);
Tensor expand_obs(const CompactObs& o);

struct Transition {
    CompactObs obs;
    Action action;
    int reward = 0;  // 1 implies terminal
    CompactObs next_obs;
    bool terminal = false;
    std::vector<Grid> masks;  // masks of obs, one per rotation
};

/// Proportional prioritized replay over a fixed-capacity ring. Priorities are
/// (|td| + eps)^alpha; new entries take the running max priority; sampling is
/// a linear cumulative scan (capacity is small enough that a sum tree would
/// be noise).
class PerBuffer {
public:
    PerBuffer(std::size_t capacity, double alpha, double eps);

    std::size_t size() const { return slots_.size(); }
    bool empty() const { return slots_.empty(); }
    std::size_t capacity() const { return capacity_; }

    /// Returns the slot index the transition landed in.
    std::size_t insert(Transition t);

    struct Sample {
        std::size_t index = 0;
        double is_weight = 1.0;  // (K*P)^-beta, normalized by the max weight
    };
    Sample sample(Rng& rng, double beta) const;

    void update_priority(std::size_t index, double td_error);

    const Transition& operator[](std::size_t i) const { return slots_[i]; }
    double priority(std::size_t i) const { return prio_[i]; }
    double max_priority() const { return max_prio_; }
    double priority_sum() const;
    std::uint64_t total_inserted() const { return inserted_; }

private:
    std::size_t capacity_;
    double alpha_;
    double eps_;
    std::vector<Transition> slots_;
    std::vector<double> prio_;
    std::size_t next_ = 0;
    std::uint64_t inserted_ = 0;
    double max_prio_ = 1.0;
};

}  // namespace s2w
