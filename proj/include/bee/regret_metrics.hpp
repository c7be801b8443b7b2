#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bee/bandit_engine.hpp"
#include "bee/index_policies.hpp"
#include "bee/world.hpp"

namespace bee {

struct ReplicationStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single value
    std::size_t count = 0;
};

[[nodiscard]] ReplicationStats summarize(std::span<const double> values);

struct RegretReport {
    double normalized_realized = 0.0;
    double normalized_pseudo = 0.0;
    /// Running sums (not averages) of the per-round regret terms; entry t-1
    /// covers rounds 1..t.
    std::vector<double> per_round_cumulative;
    std::vector<double> per_round_cumulative_pseudo;
    double baseline = 0.0;
    ReplicationStats replication;
};

/// Normalized realized regret against the true best expert's opinions.
/// The best expert's opinion is evaluated every round from its own
/// substream whether or not it was consulted.
[[nodiscard]] RegretReport realized_regret(const RunTrace& trace, const World& world);

/// max_i p_i minus the average competence of the chosen leaders.
[[nodiscard]] double pseudo_regret_bee(const RunTrace& trace, const CompetenceProfile& profile);

struct OracleAccuracy {
    double value = 0.0;
    double std_error = 0.0;  // zero for exact enumeration
    bool exact = true;
};

inline constexpr std::size_t kOracleEnumerationLimit = 20;
inline constexpr std::uint64_t kOracleMonteCarloSamples = 10'000'000;

/// Exact probability that the weighted vote sign(sum x_i (p_i - 1/2)) over
/// independent experts is correct, ties counted one half. Enumerates all
/// 2^n correctness patterns.
[[nodiscard]] double weighted_vote_accuracy_exact(std::span<const double> competences);

/// Monte Carlo estimate of the same quantity.
[[nodiscard]] OracleAccuracy weighted_vote_accuracy_monte_carlo(std::span<const double> competences,
                                                                std::uint64_t samples,
                                                                std::uint64_t key);

/// Accuracy of true-weight linearized naive Bayes over the m most competent
/// experts: exact for m <= 20, Monte Carlo with 1e7 samples above that.
[[nodiscard]] OracleAccuracy oracle_committee_accuracy(const CompetenceProfile& profile,
                                                       std::size_t m, std::uint64_t mc_key = 0);

/// Best true-weight accuracy over every size-m committee. Exponential in M;
/// used to cross-check the top-m choice on small populations.
[[nodiscard]] double exhaustive_committee_accuracy(const CompetenceProfile& profile, std::size_t m);

/// Oracle accuracy minus the empirical decision accuracy, averaged over
/// replications and rounds. All traces must come from the same profile.
[[nodiscard]] RegretReport pseudo_regret_swarm(std::span<const RunTrace> traces,
                                               const CompetenceProfile& profile, std::size_t m,
                                               double oracle_accuracy);

/// Per-round cumulative regret sums for trace output. BEE pseudo terms use
/// max p - p_leader; SWARM pseudo terms use `swarm_baseline` - 1{correct}.
struct RegretCurves {
    std::vector<double> realized;
    std::vector<double> pseudo;
};

[[nodiscard]] RegretCurves regret_curves(const RunTrace& trace, const World& world,
                                         double swarm_baseline);

struct BoundParams {
    std::vector<double> gaps;  // Delta_i for experts outside the committee, Delta_i > 0 only
    double potential = 0.0;    // Phi
    double committee_correct = 0.0;
    double constant = 0.0;
    double thompson_epsilon = 0.2;
    std::uint64_t horizon = 0;
    std::size_t expert_count = 0;
};

struct LemmaBound {
    BoundParams params;
    double bound = 0.0;
};

/// (ln T / T) sum over non-members with Delta_i > 0 of 1 / Delta_i, where
/// Delta_i = max_j p_j - p_i over the whole population.
[[nodiscard]] double potential(const CompetenceProfile& profile,
                               std::span<const ExpertIndex> committee, std::uint64_t horizon);

/// Regret bound for a leader chosen outside a fixed peer committee, in
/// agreement-reward space. Requires p_C > 1/2.
[[nodiscard]] LemmaBound lemma_bound(const CompetenceProfile& profile,
                                     std::span<const ExpertIndex> committee, PolicyKind kind,
                                     std::uint64_t horizon, double thompson_epsilon = 0.2);

/// Agreement-space pseudo regret of a fixed-committee run over its first
/// `rounds` rounds: mean over rounds of max_i pt_i - pt_leader, with pt the
/// exact pseudo competences of the candidates.
[[nodiscard]] double fixed_committee_pseudo_regret(const FixedCommitteeTrace& trace,
                                                   const CompetenceProfile& profile,
                                                   std::uint64_t rounds);

}  // namespace bee
