#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace s2w {

/// Deterministic finite MDP with {0,1} rewards. Terminal states self-loop
/// with zero reward, so their Q values are identically zero.
struct TinyMDP {
    int states = 0;
    int actions = 0;
    std::vector<int> next;       // states * actions entries
    std::vector<double> reward;  // same layout, values in {0, 1}
    std::vector<std::uint8_t> terminal;  // per state
    double gamma = 0.95;

    std::size_t idx(int s, int a) const {
        return static_cast<std::size_t>(s) * actions + a;
    }
    void validate() const;

    /// Chain of n non-terminal states plus one terminal. Action 1 moves
    /// forward (the last hop pays reward 1), action 0 moves back (clamped at
    /// state 0). Optimal Q along the forward actions is gamma^(n-1-s).
    static TinyMDP chain(int n, double gamma);
};

struct ValueIterationResult {
    std::vector<double> q;
    std::vector<double> residuals;  // sup-norm Bellman residual per sweep
};

/// Synchronous Bellman backups to sup-norm residual <= tol.
ValueIterationResult value_iteration(const TinyMDP& mdp, double tol, int max_sweeps = 100000);

struct StepSizeRule {
    enum class Kind { Harmonic, Constant };
    Kind kind = Kind::Harmonic;
    double value = 0.1;  // used by Constant

    double at(std::uint64_t visit_count) const {
        return kind == Kind::Harmonic ? 1.0 / static_cast<double>(visit_count) : value;
    }
};

using QTableObserver = std::function<void(const std::vector<double>&)>;

/// Epsilon-greedy tabular Q-learning with per-(s,a) visit-count step sizes.
/// Episodes start in a uniformly drawn non-terminal state and restart on
/// terminal arrival. Deterministic per seed.
std::vector<double> tabular_q_learning(const TinyMDP& mdp, std::uint64_t steps,
                                       std::uint64_t seed, double epsilon = 0.3,
                                       StepSizeRule rule = {},
                                       const QTableObserver& observer = nullptr);

/// Mask-aware variant: behavior draws only on-mask actions; every visit also
/// assigns off-mask entries of the visited state toward zero; bootstrapping
/// still maxes over all actions. With an all-true mask the visited draw
/// sequence and Q trajectory are identical to tabular_q_learning.
std::vector<double> tabular_ki_q_learning(const TinyMDP& mdp,
                                          const std::vector<std::uint8_t>& masks,
                                          std::uint64_t steps, std::uint64_t seed,
                                          double epsilon = 0.3, StepSizeRule rule = {},
                                          const QTableObserver& observer = nullptr);

}  // namespace s2w
