#include "bee/bandit_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "bee/committee_math.hpp"

namespace bee {

namespace {

Opinion sign_or_coin(long sum, RandomStream& tie_break) {
    if (sum > 0) return 1;
    if (sum < 0) return -1;
    return tie_break.coin();
}

void validate_run(const World& world, const PolicySpec& policy, std::size_t m,
                  std::uint64_t horizon, const EngineOptions& options) {
    policy.validate();
    const std::size_t experts = world.expert_count();
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (m < 2 || m > experts) {
        throw std::invalid_argument("committee size m=" + std::to_string(m) +
                                    " must lie in [2, " + std::to_string(experts) + "]");
    }
    if (!options.pinned_committee.empty()) {
        if (options.pinned_committee.size() != m) {
            throw std::invalid_argument("pinned committee size differs from m");
        }
        for (ExpertIndex i : options.pinned_committee) {
            if (i >= experts) throw std::out_of_range("pinned committee index out of range");
        }
    }
    if (!options.oracle_weights.empty() && options.oracle_weights.size() != experts) {
        throw std::invalid_argument("oracle weights must cover every expert");
    }
}

std::size_t position_of(std::span<const ExpertIndex> committee, ExpertIndex expert) {
    return static_cast<std::size_t>(std::find(committee.begin(), committee.end(), expert) -
                                    committee.begin());
}

RunTrace run_engine(World& world, const PolicySpec& policy, std::size_t m, std::uint64_t horizon,
                    const EngineOptions& options, Algorithm algorithm) {
    validate_run(world, policy, m, horizon, options);
    if (world.rounds_issued() != 0) throw std::logic_error("world has already issued tasks");

    RunTrace trace;
    trace.algorithm = algorithm;
    trace.policy = policy;
    trace.m = m;
    trace.seed = world.seed();
    if (m % 2 == 1) {
        trace.warnings.push_back("odd committee size m=" + std::to_string(m) +
                                 " leaves an even number of peers; agreement rewards will "
                                 "include tie coins");
    }
    trace.rounds.reserve(static_cast<std::size_t>(horizon));

    RandomStream tie_break(world.seed().key(Stream::TieBreak));
    RandomStream policy_rng(world.seed().key(Stream::Policy));

    auto init = initialize(world, algorithm, tie_break);
    std::vector<ExpertStats> stats = std::move(init.stats);
    trace.rounds.push_back(std::move(init.outcome));

    std::vector<double> scores;
    std::vector<double> weights(m);
    const bool lazy = policy.kind == PolicyKind::KlUcb && options.pinned_committee.empty() &&
                      !options.exhaustive_klucb;
    std::optional<LazyKlUcbRanker> klucb_ranker;
    if (lazy) klucb_ranker.emplace(policy);
    for (std::uint64_t t = 2; t <= horizon; ++t) {
        Consultation pick;
        if (lazy) {
            pick = klucb_ranker->rank(stats, t, m);
        } else if (options.pinned_committee.empty()) {
            compute_indices(stats, policy, t, policy_rng, scores);
            pick = rank_by_scores(scores, m, policy.selects_minimum());
        } else {
            compute_indices(stats, policy, t, policy_rng, scores);
            pick.committee = options.pinned_committee;
            std::vector<double> member_scores;
            member_scores.reserve(m);
            for (ExpertIndex i : pick.committee) member_scores.push_back(scores[i]);
            pick.leader = pick.committee[rank_by_scores(member_scores, 1, policy.selects_minimum())
                                             .leader];
        }

        TaskRecord rec = world.sample_round(pick.committee);
        RoundOutcome out;
        out.round = rec.round;
        out.leader = pick.leader;
        out.label = rec.label;

        if (algorithm == Algorithm::Bee) {
            out.decision = rec.opinions[position_of(rec.committee, pick.leader)];
            out.rewards = agreement_rewards(rec.opinions, tie_break);
            for (std::size_t k = 0; k < m; ++k) posterior_update(stats[rec.committee[k]], out.rewards[k]);
        } else {
            out.rewards = agreement_rewards(rec.opinions, tie_break);
            for (std::size_t k = 0; k < m; ++k) posterior_update(stats[rec.committee[k]], out.rewards[k]);
            for (std::size_t k = 0; k < m; ++k) {
                const ExpertIndex i = rec.committee[k];
                weights[k] = options.oracle_weights.empty() ? stats[i].estimate()
                                                            : options.oracle_weights[i];
            }
            out.decision = lnb_aggregate(rec.opinions, weights, tie_break);
        }
        out.committee = std::move(rec.committee);
        trace.rounds.push_back(std::move(out));
    }
    trace.final_stats = std::move(stats);
    return trace;
}

}  // namespace

int agreement_reward(std::size_t member, std::span<const Opinion> opinions,
                     RandomStream& tie_break) {
    if (opinions.size() < 2) {
        throw std::invalid_argument("agreement reward needs at least one peer");
    }
    if (member >= opinions.size()) throw std::out_of_range("member position out of range");
    long peers = 0;
    for (std::size_t k = 0; k < opinions.size(); ++k) {
        if (k != member) peers += opinions[k];
    }
    return sign_or_coin(peers, tie_break) == opinions[member] ? 1 : 0;
}

std::vector<std::uint8_t> agreement_rewards(std::span<const Opinion> opinions,
                                            RandomStream& tie_break) {
    if (opinions.size() < 2) {
        throw std::invalid_argument("agreement reward needs at least one peer");
    }
    const long total = std::accumulate(opinions.begin(), opinions.end(), 0L);
    std::vector<std::uint8_t> rewards(opinions.size());
    for (std::size_t k = 0; k < opinions.size(); ++k) {
        rewards[k] = sign_or_coin(total - opinions[k], tie_break) == opinions[k] ? 1 : 0;
    }
    return rewards;
}

Opinion lnb_aggregate(std::span<const Opinion> opinions, std::span<const double> estimates,
                      RandomStream& tie_break) {
    if (opinions.size() != estimates.size()) {
        throw std::invalid_argument("opinions and estimates differ in length");
    }
    double sum = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < opinions.size(); ++k) {
        sum += opinions[k] * (estimates[k] - 0.5);
        scale += std::abs(estimates[k] - 0.5);
    }
    // cancellation of equal weights may leave round-off instead of zero
    if (std::abs(sum) <= 1e-12 * scale) return tie_break.coin();
    if (sum > 0.0) return 1;
    if (sum < 0.0) return -1;
    return tie_break.coin();
}

Initialization initialize(World& world, Algorithm algorithm, RandomStream& tie_break) {
    const std::size_t experts = world.expert_count();
    std::vector<ExpertIndex> everyone(experts);
    std::iota(everyone.begin(), everyone.end(), ExpertIndex{0});

    TaskRecord rec = world.sample_round(everyone);
    Initialization init;
    init.stats.assign(experts, ExpertStats{});

    RoundOutcome& out = init.outcome;
    out.round = rec.round;
    out.label = rec.label;
    out.leader = 0;
    out.rewards = agreement_rewards(rec.opinions, tie_break);
    for (std::size_t k = 0; k < experts; ++k) posterior_update(init.stats[k], out.rewards[k]);
    out.decision = algorithm == Algorithm::Bee ? rec.opinions[0]
                                               : majority_vote(rec.opinions, tie_break);
    out.committee = std::move(rec.committee);
    return init;
}

RunTrace run_bee(World& world, const PolicySpec& policy, std::size_t m, std::uint64_t horizon,
                 const EngineOptions& options) {
    return run_engine(world, policy, m, horizon, options, Algorithm::Bee);
}

RunTrace run_swarm(World& world, const PolicySpec& policy, std::size_t m, std::uint64_t horizon,
                   const EngineOptions& options) {
    return run_engine(world, policy, m, horizon, options, Algorithm::Swarm);
}

FixedCommitteeTrace run_fixed_committee(World& world, const PolicySpec& policy,
                                        std::span<const ExpertIndex> committee,
                                        std::uint64_t horizon) {
    policy.validate();
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (world.rounds_issued() != 0) throw std::logic_error("world has already issued tasks");
    const std::size_t experts = world.expert_count();
    if (committee.empty()) throw std::invalid_argument("fixed committee is empty");

    FixedCommitteeTrace trace;
    trace.committee.assign(committee.begin(), committee.end());
    std::vector<bool> in_committee(experts, false);
    for (ExpertIndex i : committee) {
        if (i >= experts) throw std::out_of_range("committee index out of range");
        if (in_committee[i]) throw std::invalid_argument("duplicate committee member");
        in_committee[i] = true;
    }
    for (ExpertIndex i = 0; i < experts; ++i) {
        if (!in_committee[i]) trace.candidates.push_back(i);
    }
    if (trace.candidates.empty()) throw std::invalid_argument("no experts outside the committee");

    RandomStream tie_break(world.seed().key(Stream::TieBreak));
    RandomStream policy_rng(world.seed().key(Stream::Policy));
    const std::size_t cn = committee.size();

    // peers first, then the experts being scored
    const auto reward_against_committee = [&](const TaskRecord& rec, std::size_t pos) {
        long peers = 0;
        for (std::size_t k = 0; k < cn; ++k) peers += rec.opinions[k];
        return sign_or_coin(peers, tie_break) == rec.opinions[pos] ? 1 : 0;
    };

    std::vector<ExpertStats> cand_stats(trace.candidates.size());
    std::vector<ExpertIndex> consulted(committee.begin(), committee.end());
    consulted.insert(consulted.end(), trace.candidates.begin(), trace.candidates.end());
    {
        const TaskRecord rec = world.sample_round(consulted);
        long peers = 0;
        for (std::size_t k = 0; k < cn; ++k) peers += rec.opinions[k];
        const Opinion vote = sign_or_coin(peers, tie_break);
        for (std::size_t c = 0; c < cand_stats.size(); ++c) {
            posterior_update(cand_stats[c], rec.opinions[cn + c] == vote ? 1 : 0);
        }
        trace.leaders.push_back(trace.candidates.front());
    }

    std::vector<double> scores;
    consulted.resize(cn + 1);
    trace.leaders.reserve(static_cast<std::size_t>(horizon));
    for (std::uint64_t t = 2; t <= horizon; ++t) {
        compute_indices(cand_stats, policy, t, policy_rng, scores);
        const std::size_t pick = rank_by_scores(scores, 1, policy.selects_minimum()).leader;
        consulted[cn] = trace.candidates[pick];
        const TaskRecord rec = world.sample_round(consulted);
        posterior_update(cand_stats[pick], reward_against_committee(rec, cn));
        trace.leaders.push_back(trace.candidates[pick]);
    }

    trace.final_stats.assign(experts, ExpertStats{});
    for (std::size_t c = 0; c < cand_stats.size(); ++c) {
        trace.final_stats[trace.candidates[c]] = cand_stats[c];
    }
    return trace;
}

}  // namespace bee
