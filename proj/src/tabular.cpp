#include "s2w/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "s2w/rng.hpp"

namespace s2w {

void TinyMDP::validate() const {
    if (states <= 0 || actions <= 0) throw std::invalid_argument("mdp: empty state/action space");
    if (next.size() != idx(states - 1, actions - 1) + 1 || reward.size() != next.size() ||
        terminal.size() != static_cast<std::size_t>(states))
        throw std::invalid_argument("mdp: table sizes inconsistent");
    if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("mdp: gamma must be in (0,1)");
    bool any_nonterminal = false;
    for (int s = 0; s < states; ++s) {
        if (!terminal[s]) any_nonterminal = true;
        for (int a = 0; a < actions; ++a) {
            const int n = next[idx(s, a)];
            if (n < 0 || n >= states) throw std::invalid_argument("mdp: transition out of range");
            if (terminal[s] && (n != s || reward[idx(s, a)] != 0.0))
                throw std::invalid_argument("mdp: terminals must self-loop with zero reward");
            const double r = reward[idx(s, a)];
            if (r != 0.0 && r != 1.0) throw std::invalid_argument("mdp: rewards must be 0 or 1");
        }
    }
    if (!any_nonterminal) throw std::invalid_argument("mdp: needs a non-terminal state");
}

TinyMDP TinyMDP::chain(int n, double gamma) {
    if (n < 1) throw std::invalid_argument("chain: need at least one non-terminal state");
    TinyMDP m;
    m.states = n + 1;
    m.actions = 2;
    m.gamma = gamma;
    m.next.assign(static_cast<std::size_t>(m.states) * 2, 0);
    m.reward.assign(m.next.size(), 0.0);
    m.terminal.assign(m.states, 0);
    m.terminal[n] = 1;
    for (int s = 0; s < n; ++s) {
        m.next[m.idx(s, 0)] = std::max(0, s - 1);
        m.next[m.idx(s, 1)] = s + 1;
        if (s == n - 1) m.reward[m.idx(s, 1)] = 1.0;
    }
    m.next[m.idx(n, 0)] = n;
    m.next[m.idx(n, 1)] = n;
    return m;
}

namespace {

double max_over_actions(const TinyMDP& mdp, const std::vector<double>& q, int s) {
    double best = q[mdp.idx(s, 0)];
    for (int a = 1; a < mdp.actions; ++a) best = std::max(best, q[mdp.idx(s, a)]);
    return best;
}

}  // namespace

ValueIterationResult value_iteration(const TinyMDP& mdp, double tol, int max_sweeps) {
    mdp.validate();
    if (tol <= 0.0) throw std::invalid_argument("value_iteration: tol must be positive");
    ValueIterationResult res;
    res.q.assign(mdp.next.size(), 0.0);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        std::vector<double> q_new(res.q.size(), 0.0);
        double residual = 0.0;
        for (int s = 0; s < mdp.states; ++s) {
            for (int a = 0; a < mdp.actions; ++a) {
                const std::size_t k = mdp.idx(s, a);
                double v = 0.0;
                if (!mdp.terminal[s]) {
                    const int n = mdp.next[k];
                    v = mdp.reward[k] +
                        (mdp.terminal[n] ? 0.0 : mdp.gamma * max_over_actions(mdp, res.q, n));
                }
                q_new[k] = v;
                residual = std::max(residual, std::abs(v - res.q[k]));
            }
        }
        res.q = std::move(q_new);
        res.residuals.push_back(residual);
        if (residual <= tol) return res;
    }
    return res;  // gamma < 1 contracts; reaching here means tol was extreme
}

namespace {

// Shared epsilon-greedy loop. masks == nullptr runs vanilla Q-learning. The
// draw order per step (episode start, explore coin, action pick) is identical
// in both modes so a full mask reproduces vanilla trajectories exactly.
std::vector<double> q_learning_core(const TinyMDP& mdp, const std::vector<std::uint8_t>* masks,
                                    std::uint64_t steps, std::uint64_t seed, double epsilon,
                                    StepSizeRule rule, const QTableObserver& observer) {
    mdp.validate();
    std::vector<int> starts;
    for (int s = 0; s < mdp.states; ++s)
        if (!mdp.terminal[s]) starts.push_back(s);

    std::vector<int> allowed_buf(mdp.actions);
    auto allowed_actions = [&](int s) {
        allowed_buf.clear();
        for (int a = 0; a < mdp.actions; ++a) {
            if (!masks || (*masks)[mdp.idx(s, a)]) allowed_buf.push_back(a);
        }
        if (allowed_buf.empty())
            throw std::invalid_argument("ki q-learning: non-terminal state with empty mask");
        return allowed_buf;
    };
    if (masks) {
        for (int s : starts) allowed_actions(s);  // fail fast on empty masks
    }

    std::vector<double> q(mdp.next.size(), 0.0);
    std::vector<std::uint64_t> visits(q.size(), 0);
    Rng rng(seed);
    int s = starts[rng.uniform_int(static_cast<int>(starts.size()))];

    for (std::uint64_t step = 0; step < steps; ++step) {
        const std::vector<int>& acts = allowed_actions(s);
        int a;
        if (rng.bernoulli(epsilon)) {
            a = acts[rng.uniform_int(static_cast<int>(acts.size()))];
        } else {
            a = acts[0];
            for (int cand : acts)
                if (q[mdp.idx(s, cand)] > q[mdp.idx(s, a)]) a = cand;
        }

        if (masks) {
            for (int off = 0; off < mdp.actions; ++off) {
                if ((*masks)[mdp.idx(s, off)] || off == a) continue;
                const std::size_t k = mdp.idx(s, off);
                const double alpha = rule.at(++visits[k]);
                q[k] += alpha * (0.0 - q[k]);
            }
        }

        const std::size_t k = mdp.idx(s, a);
        const int n = mdp.next[k];
        const double bootstrap = mdp.terminal[n] ? 0.0 : mdp.gamma * max_over_actions(mdp, q, n);
        const double y = mdp.reward[k] + bootstrap;
        const double alpha = rule.at(++visits[k]);
        q[k] += alpha * (y - q[k]);

        if (observer) observer(q);
        s = mdp.terminal[n] ? starts[rng.uniform_int(static_cast<int>(starts.size()))] : n;
    }
    return q;
}

}  // namespace

std::vector<double> tabular_q_learning(const TinyMDP& mdp, std::uint64_t steps,
                                       std::uint64_t seed, double epsilon, StepSizeRule rule,
                                       const QTableObserver& observer) {
    return q_learning_core(mdp, nullptr, steps, seed, epsilon, rule, observer);
}

std::vector<double> tabular_ki_q_learning(const TinyMDP& mdp,
                                          const std::vector<std::uint8_t>& masks,
                                          std::uint64_t steps, std::uint64_t seed, double epsilon,
                                          StepSizeRule rule, const QTableObserver& observer) {
    if (masks.size() != mdp.next.size())
        throw std::invalid_argument("ki q-learning: mask table size mismatch");
    return q_learning_core(mdp, &masks, steps, seed, epsilon, rule, observer);
}

}  // namespace s2w
