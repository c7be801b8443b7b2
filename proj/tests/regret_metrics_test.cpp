#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bee/bandit_engine.hpp"
#include "bee/committee_math.hpp"
#include "bee/regret_metrics.hpp"

namespace {

using bee::CompetenceProfile;
using bee::ExpertIndex;
using bee::PolicyKind;
using bee::RunTrace;
using bee::World;
using bee::WorldSeed;

// Drives `world` for `rounds` tasks with a fixed leader whose opinion is
// always committed.
RunTrace follow_expert(World& world, ExpertIndex leader, std::uint64_t rounds) {
    RunTrace trace;
    for (std::uint64_t t = 0; t < rounds; ++t) {
        const std::vector<ExpertIndex> c{leader};
        const auto rec = world.sample_round(c);
        bee::RoundOutcome o;
        o.round = rec.round;
        o.committee = rec.committee;
        o.leader = leader;
        o.decision = rec.opinions[0];
        o.label = rec.label;
        trace.rounds.push_back(o);
    }
    return trace;
}

TEST(Summarize, MeanAndSampleStd) {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto s = bee::summarize(v);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.stddev, 1.2909944487358056, 1e-15);
    EXPECT_EQ(s.count, 4u);
    EXPECT_EQ(bee::summarize(std::vector<double>{7.0}).stddev, 0.0);
}

TEST(RealizedRegret, FollowingTheBestIsZero) {
    const CompetenceProfile p({0.6, 0.8, 0.7});
    World w(p, WorldSeed{1, 0});
    const auto trace = follow_expert(w, 1, 5000);
    const auto r = bee::realized_regret(trace, w);
    EXPECT_EQ(r.normalized_realized, 0.0);
    EXPECT_NEAR(r.normalized_pseudo, 0.0, 1e-12);
    EXPECT_EQ(r.baseline, 0.8);
    EXPECT_NEAR(bee::pseudo_regret_bee(trace, p), 0.0, 1e-12);
}

TEST(RealizedRegret, FixedSuboptimalExpertConverges) {
    const CompetenceProfile p({0.75, 0.65});
    constexpr std::uint64_t kRounds = 100000;
    World w(p, WorldSeed{2, 0});
    const auto trace = follow_expert(w, 1, kRounds);
    const auto r = bee::realized_regret(trace, w);
    EXPECT_NEAR(r.normalized_realized, 0.10, 3.0 * std::sqrt(1.0 / (2.0 * kRounds)));
    EXPECT_NEAR(r.normalized_pseudo, 0.10, 1e-12);
    ASSERT_EQ(r.per_round_cumulative.size(), kRounds);
    EXPECT_NEAR(r.per_round_cumulative.back() / kRounds, r.normalized_realized, 1e-15);
}

TEST(RealizedRegret, SingleRoundBounds) {
    const CompetenceProfile p({0.9, 0.6});
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        World probe(p, WorldSeed{seed, 0});
        if (probe.oracle_correct(0, 1) || !probe.oracle_correct(1, 1)) continue;
        World w(p, WorldSeed{seed, 0});
        const auto trace = follow_expert(w, 1, 1);
        EXPECT_EQ(bee::realized_regret(trace, w).normalized_realized, -1.0);
        return;
    }
    FAIL() << "no seed found";
}

TEST(RealizedRegret, LengthMismatchIsAnError) {
    const CompetenceProfile p({0.6, 0.7});
    World w(p, WorldSeed{1, 0});
    auto trace = follow_expert(w, 0, 10);
    trace.rounds.pop_back();
    EXPECT_THROW((void)bee::realized_regret(trace, w), std::invalid_argument);
}

TEST(PseudoRegretBee, AlternatingLeaders) {
    const CompetenceProfile p({0.75, 0.65});
    RunTrace trace;
    for (int t = 0; t < 10; ++t) {
        bee::RoundOutcome o;
        o.leader = static_cast<ExpertIndex>(t % 2);
        trace.rounds.push_back(o);
    }
    EXPECT_NEAR(bee::pseudo_regret_bee(trace, p), 0.05, 1e-15);
}

TEST(PseudoRegretBee, RealizedTracksPseudoAcrossReplications) {
    const auto profile = CompetenceProfile::draw_uniform(20, 0.5, 0.75, WorldSeed{5, 0});
    bee::PolicySpec spec;
    spec.kind = PolicyKind::Ucb1;
    double diff = 0.0;
    constexpr int kReps = 20;
    constexpr std::uint64_t kRounds = 5000;
    for (int r = 0; r < kReps; ++r) {
        World w(profile, WorldSeed{5, static_cast<std::uint64_t>(r)});
        const auto trace = bee::run_bee(w, spec, 4, kRounds);
        const auto rep = bee::realized_regret(trace, w);
        diff += rep.normalized_realized - rep.normalized_pseudo;
        EXPECT_LE(rep.normalized_pseudo, 0.25);
    }
    // each replication's difference has variance at most 1 / T
    EXPECT_NEAR(diff / kReps, 0.0, 3.0 * std::sqrt(1.0 / (kRounds * kReps)));
}

double enumerate_weighted(const std::vector<double>& p) {
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << p.size()); ++mask) {
        double pr = 1.0, sum = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const bool c = (mask >> k) & 1u;
            pr *= c ? p[k] : 1.0 - p[k];
            sum += (c ? 1.0 : -1.0) * (p[k] - 0.5);
        }
        if (std::abs(sum) < 1e-12) total += 0.5 * pr;
        else if (sum > 0) total += pr;
    }
    return total;
}

TEST(OracleAccuracy, KnownValues) {
    EXPECT_NEAR(bee::weighted_vote_accuracy_exact(std::vector<double>{0.75, 0.75, 0.75}), 0.84375, 1e-15);
    EXPECT_NEAR(bee::weighted_vote_accuracy_exact(std::vector<double>{0.8, 0.6}), 0.8, 1e-15);
    // 0.4 = 0.2 + 0.15 + 0.05 is an exact tie and counts one half
    EXPECT_NEAR(bee::weighted_vote_accuracy_exact(std::vector<double>{0.9, 0.7, 0.65, 0.55, 0.6}),
                357501.0 / 400000.0, 1e-12);

    const CompetenceProfile p({0.6, 0.8, 0.55, 0.7});
    EXPECT_DOUBLE_EQ(bee::oracle_committee_accuracy(p, 1).value, 0.8);
    const auto two = bee::oracle_committee_accuracy(p, 2);
    EXPECT_TRUE(two.exact);
    EXPECT_NEAR(two.value, 0.8, 1e-15);
}

TEST(OracleAccuracy, MatchesBruteForceEnumeration) {
    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> u(0.5, 0.95);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p(1 + trial % 10);
        for (auto& x : p) x = u(gen);
        ASSERT_NEAR(bee::weighted_vote_accuracy_exact(p), enumerate_weighted(p), 1e-12);
    }
}

TEST(OracleAccuracy, MonotoneForPairsAndHomogeneousCommittees) {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0.5, 0.9);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> pair{u(gen), u(gen)};
        const double before = bee::weighted_vote_accuracy_exact(pair);
        pair[trial % 2] += 0.05;
        ASSERT_GE(bee::weighted_vote_accuracy_exact(pair), before - 1e-12);

        const double q = u(gen);
        const std::vector<double> low(1 + trial % 9, q);
        const std::vector<double> high(low.size(), q + 0.05);
        ASSERT_GE(bee::weighted_vote_accuracy_exact(high), bee::weighted_vote_accuracy_exact(low) - 1e-12);
    }
}

TEST(OracleAccuracy, LinearWeightsAreNotMonotoneInGeneral) {
    // Raising one member's competence also raises its weight, which can
    // move the linear rule further from the log-odds optimum.
    const std::vector<double> before{0.541, 0.636, 0.686, 0.651, 0.788, 0.773};
    std::vector<double> after = before;
    after[0] = 0.591;
    EXPECT_NEAR(bee::weighted_vote_accuracy_exact(before), 0.858942431113216, 1e-12);
    EXPECT_NEAR(bee::weighted_vote_accuracy_exact(after), 0.857581880056736, 1e-12);
}

TEST(OracleAccuracy, MonteCarloAgreesWithEnumeration) {
    std::mt19937_64 gen(29);
    std::uniform_real_distribution<double> u(0.5, 0.75);
    for (std::size_t m : {18u, 19u}) {
        std::vector<double> p(m);
        for (auto& x : p) x = u(gen);
        const double exact = bee::weighted_vote_accuracy_exact(p);
        const auto mc = bee::weighted_vote_accuracy_monte_carlo(p, 1000000, 1234 + m);
        EXPECT_FALSE(mc.exact);
        EXPECT_GT(mc.std_error, 0.0);
        EXPECT_NEAR(mc.value, exact, 3.0 * mc.std_error) << "m=" << m;
    }
}

TEST(OracleAccuracy, LargeCommitteesUseMonteCarlo) {
    const auto p = CompetenceProfile::draw_uniform(30, 0.5, 0.75, WorldSeed{3, 0});
    const auto acc = bee::oracle_committee_accuracy(p, 22, 99);
    EXPECT_FALSE(acc.exact);
    EXPECT_GT(acc.value, 0.5);
    EXPECT_LT(acc.std_error, 1e-3);
    EXPECT_EQ(bee::oracle_committee_accuracy(p, 22, 99).value, acc.value);
    EXPECT_THROW((void)bee::oracle_committee_accuracy(p, 31), std::invalid_argument);
}

TEST(OracleAccuracy, ExhaustiveSearchIsAtLeastTopM) {
    std::mt19937_64 gen(37);
    std::uniform_real_distribution<double> u(0.5, 0.75);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> p(8);
        for (auto& x : p) x = u(gen);
        const CompetenceProfile prof(p);
        for (std::size_t m = 1; m <= 4; ++m) {
            ASSERT_GE(bee::exhaustive_committee_accuracy(prof, m) + 1e-12,
                      bee::oracle_committee_accuracy(prof, m).value);
        }
    }
}

TEST(PseudoRegretSwarm, OracleWeightsOnTopCommitteeIsNearZero) {
    const CompetenceProfile profile({0.72, 0.5, 0.68, 0.6, 0.55, 0.7, 0.52, 0.65});
    bee::EngineOptions opts;
    opts.pinned_committee = {0, 5, 2, 7};
    opts.oracle_weights.assign(profile.competences().begin(), profile.competences().end());
    bee::PolicySpec spec;
    constexpr std::uint64_t kRounds = 20000;
    constexpr int kReps = 5;
    std::vector<RunTrace> traces;
    for (int r = 0; r < kReps; ++r) {
        World w(profile, WorldSeed{41, static_cast<std::uint64_t>(r)});
        traces.push_back(bee::run_swarm(w, spec, 4, kRounds, opts));
    }
    const double oracle = bee::oracle_committee_accuracy(profile, 4).value;
    const auto report = bee::pseudo_regret_swarm(traces, profile, 4, oracle);
    EXPECT_EQ(report.baseline, oracle);
    EXPECT_EQ(report.replication.count, static_cast<std::size_t>(kReps));
    EXPECT_NEAR(report.normalized_pseudo, 0.0, 3.0 * std::sqrt(1.0 / (2.0 * kRounds * kReps)));
    EXPECT_LE(report.normalized_pseudo, 1.0);
}

TEST(LemmaBound, WorkedExample) {
    // three members at 0.75 (p_C = 0.84375) and outsiders (0.75, 0.7, 0.6)
    const CompetenceProfile p({0.75, 0.75, 0.75, 0.75, 0.7, 0.6});
    const std::vector<ExpertIndex> c{0, 1, 2};
    constexpr std::uint64_t T = 100000;
    EXPECT_NEAR(bee::potential(p, c, T), 0.00307011345732539425, 1e-15);

    const auto ucb = bee::lemma_bound(p, c, PolicyKind::Ucb1, T);
    EXPECT_NEAR(ucb.bound, 0.0446561957429148254, 1e-14);
    EXPECT_NEAR(ucb.params.committee_correct, 0.84375, 1e-15);
    EXPECT_EQ(ucb.params.constant, 10.0);
    EXPECT_EQ(ucb.params.gaps.size(), 2u);

    EXPECT_NEAR(bee::lemma_bound(p, c, PolicyKind::KlUcb, T).bound, 0.00223280978714574127, 1e-15);
    EXPECT_NEAR(bee::lemma_bound(p, c, PolicyKind::Imed, T).bound, 0.00223280978714574127, 1e-15);
    EXPECT_NEAR(bee::lemma_bound(p, c, PolicyKind::Thompson, T, 0.2).bound, 0.00685874348914977905,
                1e-15);
    EXPECT_NEAR(bee::lemma_bound(p, c, PolicyKind::Moss, T).bound, 0.188930969516136198, 1e-13);
}

TEST(LemmaBound, ReliableCommitteeLimitAndErrors) {
    const CompetenceProfile strong({0.999, 0.999, 0.999, 0.8, 0.7});
    const std::vector<ExpertIndex> c{0, 1, 2};
    const auto b = bee::lemma_bound(strong, c, PolicyKind::Ucb1, 10000);
    EXPECT_NEAR(b.bound, 10.0 * b.params.potential, 1e-3 * b.bound);

    const CompetenceProfile weak({0.5, 0.5, 0.8, 0.7});
    const std::vector<ExpertIndex> w{0, 1};
    EXPECT_THROW((void)bee::lemma_bound(weak, w, PolicyKind::Ucb1, 1000), std::invalid_argument);
}

TEST(LemmaBound, ZeroGapsContributeNothing) {
    const CompetenceProfile p({0.7, 0.7, 0.7, 0.8, 0.8, 0.6});
    const std::vector<ExpertIndex> c{0, 1, 2};
    const auto b = bee::lemma_bound(p, c, PolicyKind::Imed, 1000);
    ASSERT_EQ(b.params.gaps.size(), 1u);
    EXPECT_NEAR(b.params.gaps[0], 0.2, 1e-15);
    EXPECT_NEAR(b.params.potential, std::log(1000.0) / 1000.0 / 0.2, 1e-15);
}

TEST(FixedCommitteePseudoRegret, AgreementSpaceGaps) {
    const CompetenceProfile p({0.7, 0.7, 0.7, 0.75, 0.6});
    bee::FixedCommitteeTrace trace;
    trace.committee = {0, 1, 2};
    trace.candidates = {3, 4};
    trace.leaders = {3, 4, 4, 3};
    const double pc = bee::committee_correct_prob(std::vector<double>{0.7, 0.7, 0.7});
    const double gap = bee::pseudo_gap(0.75, 0.6, pc);
    EXPECT_NEAR(bee::fixed_committee_pseudo_regret(trace, p, 4), gap / 2.0, 1e-15);
    EXPECT_NEAR(bee::fixed_committee_pseudo_regret(trace, p, 1), 0.0, 1e-15);
}

}  // namespace
