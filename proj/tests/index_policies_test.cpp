#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bee/index_policies.hpp"

namespace {

using bee::ExpertStats;
using bee::KlUcbBudget;
using bee::PolicyKind;
using bee::PolicySpec;

ExpertStats stats_with(double mean, std::uint64_t consults) {
    ExpertStats s;
    s.consults = consults;
    s.agreements = static_cast<std::uint64_t>(std::llround(mean * static_cast<double>(consults)));
    s.alpha = 1.0 + static_cast<double>(s.agreements);
    s.beta = 1.0 + static_cast<double>(consults - s.agreements);
    return s;
}

PolicySpec spec_of(PolicyKind kind, KlUcbBudget budget = KlUcbBudget::Plus) {
    PolicySpec s;
    s.kind = kind;
    s.klucb_budget = budget;
    s.horizon = 100000;
    s.expert_count = 100;
    return s;
}

TEST(PolicyNames, RoundTrip) {
    for (const char* name : {"ucb1", "klucb+", "klucb", "imed", "moss", "thompson"}) {
        EXPECT_EQ(bee::policy_name(bee::parse_policy(name, KlUcbBudget::Plain)), name);
    }
    EXPECT_EQ(bee::policy_name(bee::parse_policy("klucb")), "klucb+");
    EXPECT_THROW((void)bee::parse_policy("epsilon-greedy"), std::invalid_argument);
    EXPECT_TRUE(bee::parse_policy("imed").selects_minimum());
    EXPECT_FALSE(bee::parse_policy("moss").selects_minimum());
}

TEST(PolicySpec, MossNeedsHorizonAndExperts) {
    PolicySpec s;
    s.kind = PolicyKind::Moss;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.horizon = 10;
    s.expert_count = 2;
    EXPECT_NO_THROW(s.validate());
}

TEST(KlDivergence, KnownValues) {
    EXPECT_EQ(bee::kl_divergence(0.3, 0.3), 0.0);
    EXPECT_EQ(bee::kl_divergence(0.0, 0.0), 0.0);
    EXPECT_NEAR(bee::kl_divergence(0.5, 0.25), 0.143841036225890464, 1e-14);
    EXPECT_NEAR(bee::kl_divergence(1.0, 0.5), 0.693147180559945309, 1e-14);
    EXPECT_NEAR(bee::kl_divergence(0.55, 0.65), 0.0212117461616663205, 1e-14);
    EXPECT_TRUE(std::isinf(bee::kl_divergence(0.4, 1.0)));
    EXPECT_TRUE(std::isinf(bee::kl_divergence(0.4, 0.0)));
}

TEST(Ucb1, Index) {
    EXPECT_NEAR(bee::ucb1_index(stats_with(0.6, 10), 100), 1.55970518243761624, 1e-12);
    EXPECT_THROW((void)bee::ucb1_index(ExpertStats{}, 5), bee::UninitializedExpert);
}

TEST(KlUcb, ZeroMeanClosedForm) {
    const double q = bee::klucb_solve(0.0, 10.0, std::log(10.0));
    EXPECT_NEAR(q, 0.205671765275718498, 1e-8);
    EXPECT_NEAR(q, 1.0 - std::exp(-std::log(10.0) / 10.0), 1e-8);

    const auto plain = spec_of(PolicyKind::KlUcb, KlUcbBudget::Plain);
    const auto plus = spec_of(PolicyKind::KlUcb, KlUcbBudget::Plus);
    const auto s = stats_with(0.0, 10);
    EXPECT_NEAR(bee::klucb_index(s, 100, plus), 1.0 - std::exp(-std::log(10.0) / 10.0), 1e-8);
    EXPECT_NEAR(bee::klucb_index(s, 100, plain), 1.0 - std::exp(-std::log(100.0) / 10.0), 1e-8);
}

TEST(KlUcb, Budgets) {
    auto plus = spec_of(PolicyKind::KlUcb, KlUcbBudget::Plus);
    EXPECT_NEAR(bee::klucb_budget(10, 100, plus), std::log(10.0), 1e-15);
    EXPECT_EQ(bee::klucb_budget(200, 100, plus), 0.0);
    auto plain = spec_of(PolicyKind::KlUcb, KlUcbBudget::Plain);
    plain.klucb_c = 3.0;
    EXPECT_NEAR(bee::klucb_budget(10, 100, plain), std::log(100.0) + 3.0 * std::log(std::log(100.0)),
                1e-14);
    // ln ln 2 < 0: the budget is clamped
    EXPECT_EQ(bee::klucb_budget(10, 2, plain), std::max(0.0, std::log(2.0) + 3.0 * std::log(std::log(2.0))));
}

TEST(KlUcb, ResidualAcrossRandomInputs) {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> mean(0.0, 1.0);
    std::uniform_real_distribution<double> budget(1e-3, 15.0);
    std::uniform_int_distribution<int> consults(1, 100000);
    int interior = 0;
    for (int k = 0; k < 10000; ++k) {
        const double p = mean(gen);
        const double n = consults(gen);
        const double b = budget(gen);
        const double q = bee::klucb_solve(p, n, b);
        ASSERT_GE(q, p);
        ASSERT_LE(q, bee::kKlUcbUpperLimit);
        if (q < bee::kKlUcbUpperLimit) {
            ++interior;
            ASSERT_LE(std::abs(n * bee::kl_divergence(p, q) - b), 1e-6) << p << ' ' << n << ' ' << b;
        }
    }
    EXPECT_GT(interior, 9000);
}

TEST(KlUcb, MonotoneInBudgetAndAboveMean) {
    double last = 0.4;
    for (double b = 0.01; b < 10.0; b *= 1.5) {
        const double q = bee::klucb_solve(0.4, 30.0, b);
        EXPECT_GT(q, last);
        last = q;
    }
    EXPECT_EQ(bee::klucb_solve(0.4, 30.0, 0.0), 0.4);
    EXPECT_EQ(bee::klucb_solve(1.0, 30.0, 2.0), 1.0);
}

TEST(Imed, Index) {
    EXPECT_NEAR(bee::imed_index(stats_with(0.55, 40), 0.65), 4.53734930058058912, 1e-12);
    EXPECT_NEAR(bee::imed_index(stats_with(0.7, 50), 0.7), std::log(50.0), 1e-15);
}

TEST(Moss, Index) {
    const auto spec = spec_of(PolicyKind::Moss);
    // 0.7 is not reachable with five consults, so shift the bonus onto it
    const auto five = stats_with(0.8, 5);
    EXPECT_NEAR(bee::moss_index(five, spec) - five.estimate() + 0.7, 1.72939956931679709, 1e-12);
    EXPECT_DOUBLE_EQ(bee::moss_index(stats_with(0.7, 1000), spec), 0.7);
    double last = 10.0;
    for (std::uint64_t n = 1; n < 2000; n += 7) {
        const double bonus = bee::moss_index(stats_with(0.0, n), spec);
        EXPECT_LE(bonus, last);
        last = bonus;
    }
}

TEST(Thompson, BetaMoments) {
    bee::RandomStream rng(2);
    ExpertStats flat;
    double sum = 0.0, sq = 0.0;
    constexpr int kDraws = 100000;
    for (int k = 0; k < kDraws; ++k) {
        const double x = bee::thompson_index(flat, rng);
        ASSERT_GE(x, 0.0);
        ASSERT_LE(x, 1.0);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / kDraws;
    EXPECT_NEAR(mean, 0.5, 0.005);
    EXPECT_NEAR(sq / kDraws - mean * mean, 1.0 / 12.0, 0.003);

    ExpertStats s;
    s.alpha = 100;
    s.beta = 50;
    sum = 0.0;
    for (int k = 0; k < 10000; ++k) sum += bee::thompson_index(s, rng);
    EXPECT_NEAR(sum / 10000, 2.0 / 3.0, 0.01);
}

TEST(PosteriorUpdate, Conjugacy) {
    ExpertStats s;
    bee::posterior_update(s, 1);
    EXPECT_EQ(s.alpha, 2.0);
    EXPECT_EQ(s.beta, 1.0);
    EXPECT_EQ(s.consults, 1u);
    EXPECT_EQ(s.agreements, 1u);

    ExpertStats t;
    t.alpha = 3;
    t.beta = 4;
    bee::posterior_update(t, 0);
    EXPECT_EQ(t.alpha, 3.0);
    EXPECT_EQ(t.beta, 5.0);

    std::mt19937_64 gen(4);
    ExpertStats u;
    for (int k = 1; k <= 500; ++k) {
        bee::posterior_update(u, static_cast<int>(gen() & 1u));
        ASSERT_EQ(u.alpha + u.beta, 2.0 + k);
        ASSERT_EQ(u.alpha - 1.0, static_cast<double>(u.agreements));
    }
    EXPECT_THROW(bee::posterior_update(u, 2), std::invalid_argument);
}

TEST(Ranking, ForcedExplorationExample) {
    // a single consult has estimate 0 or 1; use 0 and compare the bonus
    std::vector<ExpertStats> s{stats_with(0.9, 100), stats_with(0.0, 1)};
    std::vector<double> psi;
    bee::RandomStream rng(0);
    bee::compute_indices(s, spec_of(PolicyKind::Ucb1), 101, rng, psi);
    EXPECT_NEAR(psi[0], 1.20381311745351811, 1e-12);
    EXPECT_NEAR(psi[1] + 0.5, 3.53813117453518108, 1e-12);
    const auto c = bee::rank_for_consultation(s, spec_of(PolicyKind::Ucb1), 101, 1, rng);
    EXPECT_EQ(c.leader, 1u);
}

TEST(Ranking, TiesGoToLowerIndex) {
    const std::vector<double> scores{0.3, 0.7, 0.7, 0.1, 0.7};
    const auto top = bee::rank_by_scores(scores, 3, false);
    EXPECT_EQ(top.committee, (std::vector<bee::ExpertIndex>{1, 2, 4}));
    EXPECT_EQ(top.leader, 1u);
    const auto bottom = bee::rank_by_scores(scores, 2, true);
    EXPECT_EQ(bottom.committee, (std::vector<bee::ExpertIndex>{3, 0}));
    EXPECT_THROW((void)bee::rank_by_scores(scores, 6, false), std::invalid_argument);
    EXPECT_THROW((void)bee::rank_by_scores(scores, 0, false), std::invalid_argument);
}

TEST(Ranking, FullPopulation) {
    std::vector<ExpertStats> s{stats_with(0.6, 10), stats_with(0.8, 10), stats_with(0.7, 10)};
    bee::RandomStream rng(0);
    const auto c = bee::rank_for_consultation(s, spec_of(PolicyKind::Ucb1), 31, 3, rng);
    EXPECT_EQ(c.committee.size(), 3u);
    EXPECT_EQ(c.leader, 1u);
}

TEST(Ranking, UninitializedExpertIsAnError) {
    std::vector<ExpertStats> s{stats_with(0.6, 10), ExpertStats{}};
    bee::RandomStream rng(0);
    for (auto kind : {PolicyKind::Ucb1, PolicyKind::KlUcb, PolicyKind::Imed, PolicyKind::Moss}) {
        EXPECT_THROW((void)bee::rank_for_consultation(s, spec_of(kind), 5, 1, rng),
                     bee::UninitializedExpert);
    }
}

TEST(Ranking, ImedPrefersBestAmongEqualCounts) {
    std::vector<ExpertStats> s{stats_with(0.6, 40), stats_with(0.7, 40), stats_with(0.7, 40)};
    bee::RandomStream rng(0);
    const auto c = bee::rank_for_consultation(s, spec_of(PolicyKind::Imed), 121, 2, rng);
    EXPECT_EQ(c.committee, (std::vector<bee::ExpertIndex>{1, 2}));
}

TEST(Ranking, ShiftInvariance) {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(20), b(20);
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = std::round(u(gen) * 8.0) / 8.0;
            b[k] = a[k] + 3.0;
        }
        const bool minimize = trial % 2 == 0;
        ASSERT_EQ(bee::rank_by_scores(a, 7, minimize).committee,
                  bee::rank_by_scores(b, 7, minimize).committee);
    }
}

TEST(Indices, PureForDeterministicPolicies) {
    std::vector<ExpertStats> s{stats_with(0.6, 12), stats_with(0.4, 3), stats_with(0.9, 40)};
    for (auto kind : {PolicyKind::Ucb1, PolicyKind::KlUcb, PolicyKind::Imed, PolicyKind::Moss}) {
        bee::RandomStream r1(1), r2(2);
        std::vector<double> a, b;
        bee::compute_indices(s, spec_of(kind), 56, r1, a);
        bee::compute_indices(s, spec_of(kind), 56, r2, b);
        EXPECT_EQ(a, b);
    }
    bee::RandomStream r1(5), r2(5);
    std::vector<double> a, b;
    bee::compute_indices(s, spec_of(PolicyKind::Thompson), 56, r1, a);
    bee::compute_indices(s, spec_of(PolicyKind::Thompson), 56, r2, b);
    EXPECT_EQ(a, b);
}

TEST(LazyKlUcb, MatchesExhaustiveRanking) {
    for (auto budget : {KlUcbBudget::Plus, KlUcbBudget::Plain}) {
        const auto spec = spec_of(PolicyKind::KlUcb, budget);
        bee::LazyKlUcbRanker lazy(spec);
        std::mt19937_64 gen(31);
        std::vector<ExpertStats> s(40);
        for (auto& e : s) bee::posterior_update(e, static_cast<int>(gen() & 1u));
        std::vector<double> psi;
        bee::RandomStream rng(0);
        for (std::uint64_t t = 2; t < 3000; ++t) {
            bee::compute_indices(s, spec, t, rng, psi);
            const auto want = bee::rank_by_scores(psi, 6, false);
            const auto got = lazy.rank(s, t, 6);
            ASSERT_EQ(got.committee, want.committee) << "round " << t;
            for (auto i : got.committee) {
                const double p = 0.45 + 0.01 * static_cast<double>(i);
                bee::posterior_update(s[i], std::uniform_real_distribution<double>()(gen) < p ? 1 : 0);
            }
        }
        EXPECT_LT(lazy.solves(), 3000u * 40u);
    }
    EXPECT_THROW(bee::LazyKlUcbRanker(spec_of(PolicyKind::Ucb1)), std::invalid_argument);
}

}  // namespace
