#include "bee/index_policies.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace bee {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x log(x / y) with 0 log 0 = 0.
double xlogxy(double x, double y) noexcept {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return kInf;
    return x * std::log(x / y);
}

void require_consulted(const ExpertStats& stats) {
    if (stats.consults == 0) {
        throw UninitializedExpert("expert has not been consulted yet; run initialization first");
    }
}

double as_real(std::uint64_t n) { return static_cast<double>(n); }

}  // namespace

void PolicySpec::validate() const {
    if (kind == PolicyKind::Moss && (horizon == 0 || expert_count == 0)) {
        throw std::invalid_argument("MOSS requires horizon and expert_count");
    }
    if (klucb_c < 0.0) {
        throw std::invalid_argument("klucb_c must be non-negative");
    }
    if (!(klucb_tolerance > 0.0)) {
        throw std::invalid_argument("klucb_tolerance must be positive");
    }
}

std::string policy_name(const PolicySpec& spec) {
    switch (spec.kind) {
        case PolicyKind::Ucb1: return "ucb1";
        case PolicyKind::KlUcb: return spec.klucb_budget == KlUcbBudget::Plus ? "klucb+" : "klucb";
        case PolicyKind::Imed: return "imed";
        case PolicyKind::Moss: return "moss";
        case PolicyKind::Thompson: return "thompson";
    }
    return "unknown";
}

PolicySpec parse_policy(std::string_view name, KlUcbBudget klucb_default) {
    PolicySpec spec;
    if (name == "ucb1") {
        spec.kind = PolicyKind::Ucb1;
    } else if (name == "klucb" || name == "kl-ucb") {
        spec.kind = PolicyKind::KlUcb;
        spec.klucb_budget = klucb_default;
    } else if (name == "klucb+" || name == "kl-ucb+") {
        spec.kind = PolicyKind::KlUcb;
        spec.klucb_budget = KlUcbBudget::Plus;
    } else if (name == "imed") {
        spec.kind = PolicyKind::Imed;
    } else if (name == "moss") {
        spec.kind = PolicyKind::Moss;
    } else if (name == "thompson" || name == "ts") {
        spec.kind = PolicyKind::Thompson;
    } else {
        throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
    }
    return spec;
}

double kl_divergence(double p, double q) noexcept {
    if (p == q) return 0.0;
    return xlogxy(p, q) + xlogxy(1.0 - p, 1.0 - q);
}

double ucb1_index(const ExpertStats& stats, std::uint64_t round) {
    require_consulted(stats);
    return stats.estimate() + std::sqrt(2.0 * std::log(as_real(round)) / as_real(stats.consults));
}

double klucb_budget(std::uint64_t consults, std::uint64_t round, const PolicySpec& spec) {
    const double base = spec.klucb_budget == KlUcbBudget::Plus
                            ? std::log(as_real(round) / as_real(consults))
                            : std::log(as_real(round));
    if (!(base > 0.0)) return 0.0;
    double budget = base;
    if (spec.klucb_c > 0.0) budget += spec.klucb_c * std::log(base);
    return std::max(budget, 0.0);
}

double klucb_solve(double mean, double consults, double budget, double tolerance) {
    if (!(budget > 0.0) || mean >= kKlUcbUpperLimit) return std::max(mean, 0.0);
    const auto g = [&](double q) { return consults * kl_divergence(mean, q) - budget; };
    const auto dg = [&](double q) { return consults * (q - mean) / (q * (1.0 - q)); };

    double lo = mean;
    // Pinsker: d(p,q) >= 2 (p-q)^2, so this point is never left of the root.
    double hi = std::min(mean + std::sqrt(budget / (2.0 * consults)), kKlUcbUpperLimit);
    double g_hi = g(hi);
    if (g_hi <= 0.0) return hi;

    double x = hi;
    double gx = g_hi;
    double last_step = hi - lo;
    for (int iter = 0; iter < 100; ++iter) {
        const double slope = dg(x);
        const double newton = x - gx / slope;
        double step;
        if (!(newton > lo && newton < hi) || std::abs(2.0 * gx) > std::abs(last_step * slope)) {
            step = x - 0.5 * (lo + hi);
            x = 0.5 * (lo + hi);
        } else {
            step = x - newton;
            x = newton;
        }
        last_step = step;
        gx = g(x);
        if (gx <= 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        if (std::abs(step) <= tolerance && std::abs(gx) <= 1e-10 * std::max(1.0, budget)) break;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) break;
    }
    return x;
}

double klucb_index(const ExpertStats& stats, std::uint64_t round, const PolicySpec& spec) {
    require_consulted(stats);
    const double budget = klucb_budget(stats.consults, round, spec);
    return klucb_solve(stats.estimate(), as_real(stats.consults), budget, spec.klucb_tolerance);
}

double imed_index(const ExpertStats& stats, double current_max_estimate) {
    require_consulted(stats);
    const double n = as_real(stats.consults);
    const double p = stats.estimate();
    const double divergence = p >= current_max_estimate ? 0.0 : kl_divergence(p, current_max_estimate);
    return n * divergence + std::log(n);
}

double moss_index(const ExpertStats& stats, const PolicySpec& spec) {
    require_consulted(stats);
    if (spec.horizon == 0 || spec.expert_count == 0) {
        throw std::invalid_argument("MOSS requires horizon and expert_count");
    }
    const double n = as_real(stats.consults);
    const double ratio = as_real(spec.horizon) / (as_real(spec.expert_count) * n);
    const double bonus = std::max(std::log(ratio), 0.0);
    return stats.estimate() + std::sqrt(bonus / n);
}

double thompson_index(const ExpertStats& stats, RandomStream& rng) {
    using Gamma = std::gamma_distribution<double>;
    Gamma& gamma = rng.gamma();
    const double x = gamma(rng.engine(), Gamma::param_type(stats.alpha, 1.0));
    const double y = gamma(rng.engine(), Gamma::param_type(stats.beta, 1.0));
    const double sum = x + y;
    // both gamma draws can underflow for tiny shape parameters
    if (!(sum > 0.0)) return stats.alpha / (stats.alpha + stats.beta);
    return x / sum;
}

void posterior_update(ExpertStats& stats, int reward) {
    if (reward != 0 && reward != 1) {
        throw std::invalid_argument("reward must be 0 or 1");
    }
    stats.consults += 1;
    stats.agreements += static_cast<std::uint64_t>(reward);
    stats.alpha += reward;
    stats.beta += 1 - reward;
}

void compute_indices(std::span<const ExpertStats> stats, const PolicySpec& spec,
                     std::uint64_t round, RandomStream& rng, std::vector<double>& out) {
    out.resize(stats.size());
    switch (spec.kind) {
        case PolicyKind::Ucb1:
            for (std::size_t i = 0; i < stats.size(); ++i) out[i] = ucb1_index(stats[i], round);
            break;
        case PolicyKind::KlUcb:
            for (std::size_t i = 0; i < stats.size(); ++i) out[i] = klucb_index(stats[i], round, spec);
            break;
        case PolicyKind::Imed: {
            double best = 0.0;
            for (const auto& s : stats) {
                require_consulted(s);
                best = std::max(best, s.estimate());
            }
            for (std::size_t i = 0; i < stats.size(); ++i) out[i] = imed_index(stats[i], best);
            break;
        }
        case PolicyKind::Moss:
            for (std::size_t i = 0; i < stats.size(); ++i) out[i] = moss_index(stats[i], spec);
            break;
        case PolicyKind::Thompson:
            for (std::size_t i = 0; i < stats.size(); ++i) {
                require_consulted(stats[i]);
                out[i] = thompson_index(stats[i], rng);
            }
            break;
    }
}

Consultation rank_by_scores(std::span<const double> scores, std::size_t m, bool minimize) {
    if (m == 0 || m > scores.size()) {
        throw std::invalid_argument("committee size must be in [1, expert count]");
    }
    std::vector<ExpertIndex> order(scores.size());
    std::iota(order.begin(), order.end(), ExpertIndex{0});
    const auto better = [&](ExpertIndex a, ExpertIndex b) {
        if (scores[a] != scores[b]) return minimize ? scores[a] < scores[b] : scores[a] > scores[b];
        return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(),
                      better);
    order.resize(m);
    Consultation c;
    c.leader = order.front();
    c.committee = std::move(order);
    return c;
}

Consultation rank_for_consultation(std::span<const ExpertStats> stats, const PolicySpec& spec,
                                   std::uint64_t round, std::size_t m, RandomStream& rng) {
    std::vector<double> scores;
    compute_indices(stats, spec, round, rng, scores);
    return rank_by_scores(scores, m, spec.selects_minimum());
}

LazyKlUcbRanker::LazyKlUcbRanker(PolicySpec spec) : spec_(spec) {
    if (spec_.kind != PolicyKind::KlUcb) {
        throw std::invalid_argument("LazyKlUcbRanker requires a KL-UCB policy");
    }
    spec_.validate();
}

void LazyKlUcbRanker::solve(std::size_t i, const ExpertStats& s, std::uint64_t round) {
    Entry& e = cache_[i];
    e.consults = s.consults;
    e.agreements = s.agreements;
    e.budget = klucb_budget(s.consults, round, spec_);
    e.value = klucb_index(s, round, spec_);
    const double mean = s.estimate();
    const double gap = e.value - mean;
    e.slope = gap > 0.0 && e.value < kKlUcbUpperLimit
                  ? e.value * (1.0 - e.value) / (as_real(s.consults) * gap)
                  : kInf;
    if (e.value >= kKlUcbUpperLimit) e.slope = 0.0;
    e.valid = true;
    lower_[i] = upper_[i] = e.value;
    exact_[i] = true;
    ++solves_;
}

Consultation LazyKlUcbRanker::rank(std::span<const ExpertStats> stats, std::uint64_t round,
                                   std::size_t m) {
    const std::size_t n = stats.size();
    if (m == 0 || m > n) {
        throw std::invalid_argument("committee size must be in [1, expert count]");
    }
    cache_.resize(n);
    lower_.assign(n, 0.0);
    upper_.assign(n, 0.0);
    exact_.assign(n, false);

    for (std::size_t i = 0; i < n; ++i) {
        const ExpertStats& s = stats[i];
        require_consulted(s);
        Entry& e = cache_[i];
        if (!e.valid || e.consults != s.consults || e.agreements != s.agreements ||
            std::isinf(e.slope)) {
            solve(i, s, round);
            continue;
        }
        const double budget = klucb_budget(s.consults, round, spec_);
        if (budget == e.budget || e.value >= kKlUcbUpperLimit) {
            lower_[i] = upper_[i] = e.value;
            exact_[i] = true;
            continue;
        }
        // margins cover the solver tolerance on both solved values
        const double rise = (budget - e.budget) * e.slope;
        lower_[i] = e.value - 1e-8;
        upper_[i] = std::min(e.value + rise * (1.0 + 1e-6) + 1e-8, 1.0);
    }

    std::vector<double> sorted_lower;
    while (true) {
        sorted_lower = lower_;
        std::nth_element(sorted_lower.begin(), sorted_lower.begin() + static_cast<std::ptrdiff_t>(m - 1),
                         sorted_lower.end(), std::greater<>());
        const double threshold = sorted_lower[m - 1];
        bool refined = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!exact_[i] && upper_[i] >= threshold) {
                solve(i, stats[i], round);
                refined = true;
            }
        }
        if (!refined) break;
    }

    // Every unsolved expert sits strictly below m solved ones.
    std::vector<double> scores(n, -kInf);
    for (std::size_t i = 0; i < n; ++i) {
        if (exact_[i]) scores[i] = lower_[i];
    }
    return rank_by_scores(scores, m, false);
}

}  // namespace bee
