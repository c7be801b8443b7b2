#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bee/index_policies.hpp"
#include "bee/random.hpp"
#include "bee/world.hpp"

namespace bee {

struct RoundOutcome {
    std::uint64_t round = 0;
    std::vector<ExpertIndex> committee;
    ExpertIndex leader = 0;
    Opinion decision = 1;
    std::vector<std::uint8_t> rewards;  // aligned with committee
    Opinion label = 1;                  // oracle channel, metrics only
};

enum class Algorithm { Bee, Swarm };

/// Test hooks. Sweeps leave these at their defaults.
struct EngineOptions {
    /// Consult exactly these experts every round after initialization.
    std::vector<ExpertIndex> pinned_committee;
    /// SWARM aggregates with (w_i - 1/2) taken from here instead of the
    /// empirical pseudo competences.
    std::vector<double> oracle_weights;
    /// Re-solve every KL-UCB index each round instead of using the lazy
    /// ranker. Both give the same committees.
    bool exhaustive_klucb = false;
};

struct RunTrace {
    Algorithm algorithm = Algorithm::Bee;
    PolicySpec policy;
    std::size_t m = 0;
    WorldSeed seed;
    std::vector<RoundOutcome> rounds;
    std::vector<ExpertStats> final_stats;
    std::vector<std::string> warnings;
};

/// 1 iff opinions[member] matches the majority of the other opinions. A
/// tied peer vote is settled by a coin from `tie_break`.
[[nodiscard]] int agreement_reward(std::size_t member, std::span<const Opinion> opinions,
                                   RandomStream& tie_break);

/// agreement_reward for every member, coins consumed in member order.
[[nodiscard]] std::vector<std::uint8_t> agreement_rewards(std::span<const Opinion> opinions,
                                                          RandomStream& tie_break);

/// Linearized naive Bayes: sign of sum_i x_i (w_i - 1/2), fair coin on zero.
[[nodiscard]] Opinion lnb_aggregate(std::span<const Opinion> opinions,
                                    std::span<const double> estimates, RandomStream& tie_break);

struct Initialization {
    std::vector<ExpertStats> stats;
    RoundOutcome outcome;
};

/// Consults every expert on the first task and credits agreement rewards
/// against the full population. Before any statistics exist all indices
/// tie, so the recorded leader is expert 0; BEE commits to its opinion,
/// SWARM to the plain majority vote.
[[nodiscard]] Initialization initialize(World& world, Algorithm algorithm,
                                        RandomStream& tie_break);

/// Blind exploration-exploitation: per round select, consult, commit to the
/// leader's opinion, then credit agreement rewards.
[[nodiscard]] RunTrace run_bee(World& world, const PolicySpec& policy, std::size_t m,
                               std::uint64_t horizon, const EngineOptions& options = {});

/// BEE with aggregation: per round select, consult, credit rewards, then
/// commit to the linearized naive Bayes vote over updated estimates.
[[nodiscard]] RunTrace run_swarm(World& world, const PolicySpec& policy, std::size_t m,
                                 std::uint64_t horizon, const EngineOptions& options = {});

/// Single-play bandit over the experts outside a fixed peer committee. The
/// committee is consulted every round; only the chosen leader is rewarded,
/// by agreement with the committee's majority.
struct FixedCommitteeTrace {
    std::vector<ExpertIndex> committee;
    std::vector<ExpertIndex> candidates;
    std::vector<ExpertIndex> leaders;  // one per round, round 1 first
    std::vector<ExpertStats> final_stats;  // indexed by expert
};

[[nodiscard]] FixedCommitteeTrace run_fixed_committee(World& world, const PolicySpec& policy,
                                                      std::span<const ExpertIndex> committee,
                                                      std::uint64_t horizon);

}  // namespace bee
