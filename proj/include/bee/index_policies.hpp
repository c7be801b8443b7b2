#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bee/random.hpp"
#include "bee/world.hpp"

namespace bee {

inline constexpr double kPriorAlpha = 1.0;
inline constexpr double kPriorBeta = 1.0;

/// Agreement statistics for one expert plus its Beta posterior.
struct ExpertStats {
    std::uint64_t consults = 0;
    std::uint64_t agreements = 0;
    double alpha = kPriorAlpha;
    double beta = kPriorBeta;

    /// Empirical pseudo competence agreements / consults. Zero before the
    /// first consultation.
    [[nodiscard]] double estimate() const noexcept {
        return consults == 0 ? 0.0
                             : static_cast<double>(agreements) / static_cast<double>(consults);
    }
};

enum class PolicyKind { Ucb1, KlUcb, Imed, Moss, Thompson };

/// KL-UCB exploration budget. `Plus` is ln(t / T_i); `Plain` is
/// ln t + c ln ln t.
enum class KlUcbBudget { Plus, Plain };

struct PolicySpec {
    PolicyKind kind = PolicyKind::Ucb1;
    std::uint64_t horizon = 0;       // MOSS only
    std::size_t expert_count = 0;    // MOSS only
    KlUcbBudget klucb_budget = KlUcbBudget::Plus;
    double klucb_c = 0.0;
    double klucb_tolerance = 1e-9;

    /// IMED ranks by smallest index, every other kind by largest.
    [[nodiscard]] bool selects_minimum() const noexcept { return kind == PolicyKind::Imed; }

    void validate() const;
};

/// Canonical name used in CLI flags and CSV output: ucb1, klucb+, klucb,
/// imed, moss, thompson.
[[nodiscard]] std::string policy_name(const PolicySpec& spec);

/// Parses a policy name. "klucb" keeps `klucb_default` as its budget form,
/// "klucb+" always uses the ln(t/T_i) budget.
[[nodiscard]] PolicySpec parse_policy(std::string_view name,
                                      KlUcbBudget klucb_default = KlUcbBudget::Plus);

/// Thrown when an index is requested for an expert that was never consulted.
class UninitializedExpert : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Bernoulli Kullback-Leibler divergence d(p, q) with 0 log 0 = 0. Returns
/// +inf when q sits on {0,1} and differs from p.
[[nodiscard]] double kl_divergence(double p, double q) noexcept;

[[nodiscard]] double ucb1_index(const ExpertStats& stats, std::uint64_t round);

/// Exploration budget of the KL-UCB index, clamped below at zero.
[[nodiscard]] double klucb_budget(std::uint64_t consults, std::uint64_t round,
                                  const PolicySpec& spec);

inline constexpr double kKlUcbUpperLimit = 1.0 - 1e-12;

/// Largest q in [mean, 1 - 1e-12] with consults * d(mean, q) <= budget.
/// Bracketed Newton iteration with bisection fallback; the bracket keeps
/// the invariant g(lo) <= 0 < g(hi) for g(q) = consults * d(mean, q) - budget.
[[nodiscard]] double klucb_solve(double mean, double consults, double budget,
                                 double tolerance = 1e-9);

[[nodiscard]] double klucb_index(const ExpertStats& stats, std::uint64_t round,
                                 const PolicySpec& spec);

/// T_i d(p_i, p_max) + ln T_i. Smaller is better.
[[nodiscard]] double imed_index(const ExpertStats& stats, double current_max_estimate);

[[nodiscard]] double moss_index(const ExpertStats& stats, const PolicySpec& spec);

/// One Beta(alpha, beta) draw built from two gamma variates.
[[nodiscard]] double thompson_index(const ExpertStats& stats, RandomStream& rng);

/// Conjugate Bernoulli update after one consultation.
void posterior_update(ExpertStats& stats, int reward);

/// Selection statistic of every expert at `round`. Thompson consumes one
/// draw per expert from `rng`, in expert order.
void compute_indices(std::span<const ExpertStats> stats, const PolicySpec& spec,
                     std::uint64_t round, RandomStream& rng, std::vector<double>& out);

struct Consultation {
    std::vector<ExpertIndex> committee;  // best first
    ExpertIndex leader = 0;
};

/// The m best experts by score (largest, or smallest when `minimize`).
/// Ties go to the lower expert index.
[[nodiscard]] Consultation rank_by_scores(std::span<const double> scores, std::size_t m,
                                          bool minimize);

[[nodiscard]] Consultation rank_for_consultation(std::span<const ExpertStats> stats,
                                                 const PolicySpec& spec, std::uint64_t round,
                                                 std::size_t m, RandomStream& rng);

/// Exact top-m KL-UCB ranking that avoids re-solving every index each round.
///
/// For an expert whose counts have not changed, the index is non-decreasing
/// and concave in the budget, so the last solved value is a lower bound and
/// its tangent an upper bound. Only experts whose bounds straddle the m-th
/// best value are solved again. The result equals
/// rank_by_scores(klucb_index(...), m) for the same inputs.
class LazyKlUcbRanker {
public:
    explicit LazyKlUcbRanker(PolicySpec spec);

    [[nodiscard]] Consultation rank(std::span<const ExpertStats> stats, std::uint64_t round,
                                    std::size_t m);

    /// Index solves performed so far.
    [[nodiscard]] std::uint64_t solves() const noexcept { return solves_; }

private:
    struct Entry {
        std::uint64_t consults = 0;
        std::uint64_t agreements = 0;
        double budget = 0.0;
        double value = 0.0;
        double slope = 0.0;  // dq/dbudget at the solved point, +inf if unknown
        bool valid = false;
    };

    void solve(std::size_t i, const ExpertStats& s, std::uint64_t round);

    PolicySpec spec_;
    std::vector<Entry> cache_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<bool> exact_;
    std::uint64_t solves_ = 0;
};

}  // namespace bee
