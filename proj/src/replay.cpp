#include "s2w/replay.hpp"

#include <cmath>
#include <stdexcept>

namespace s2w {

CompactObs compress_obs(const Tensor& t) {
    CompactObs o;
    o.c = t.c;
    o.h = t.h;
    o.w = t.w;
    o.v.assign(t.v.begin(), t.v.end());
    return o;
}

Tensor expand_obs(const CompactObs& o) {
    Tensor t(o.c, o.h, o.w);
    for (std::size_t k = 0; k < o.v.size(); ++k) t.v[k] = o.v[k];
    return t;
}

PerBuffer::PerBuffer(std::size_t capacity, double alpha, double eps)
    : capacity_(capacity), alpha_(alpha), eps_(eps) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    if (eps <= 0.0) throw std::invalid_argument("replay priority epsilon must be positive");
}

std::size_t PerBuffer::insert(Transition t) {
    std::size_t at;
    if (slots_.size() < capacity_) {
        at = slots_.size();
        slots_.push_back(std::move(t));
        prio_.push_back(max_prio_);
    } else {
        at = next_;
        slots_[at] = std::move(t);
        prio_[at] = max_prio_;
    }
    next_ = (at + 1) % capacity_;
    ++inserted_;
    return at;
}

PerBuffer::Sample PerBuffer::sample(Rng& rng, double beta) const {
    if (slots_.empty()) throw std::runtime_error("replay sample: buffer is empty");
    const double total = priority_sum();
    const double x = rng.uniform() * total;
    std::size_t pick = slots_.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < prio_.size(); ++i) {
        acc += prio_[i];
        if (x < acc) {
            pick = i;
            break;
        }
    }
    double min_p = prio_[0];
    for (double p : prio_)
        if (p < min_p) min_p = p;
    // Weight (K*P_i)^-beta normalized by the max weight, which belongs to the
    // minimum-probability entry; the ratio needs no K or total factor.
    const double w = std::pow(min_p / prio_[pick], beta);
    return {pick, w};
}

void PerBuffer::update_priority(std::size_t index, double td_error) {
    if (index >= prio_.size()) throw std::out_of_range("replay priority update: bad index");
    const double p = std::pow(std::abs(td_error) + eps_, alpha_);
    prio_[index] = p;
    if (p > max_prio_) max_prio_ = p;
}

double PerBuffer::priority_sum() const {
    double s = 0.0;
    for (double p : prio_) s += p;
    return s;
}

}  // namespace s2w
