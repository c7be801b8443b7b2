#pragma once

#include <span>
#include <vector>

#include "bee/random.hpp"
#include "bee/world.hpp"

namespace bee {

/// A set of experts together with their competences, aligned by position.
struct Committee {
    std::vector<ExpertIndex> members;
    std::vector<double> member_competences;

    static Committee from_profile(const CompetenceProfile& profile,
                                  std::span<const ExpertIndex> members);

    [[nodiscard]] std::size_t size() const noexcept { return members.size(); }
};

enum class PseudoBasis { ExactFormula, LeaveOneOutExact, Empirical };

struct PseudoCompetence {
    double value = 0.5;
    PseudoBasis basis = PseudoBasis::ExactFormula;
};

/// Sign of the opinion sum; an exact zero is settled by one fair coin from
/// `tie_break`.
[[nodiscard]] Opinion majority_vote(std::span<const Opinion> opinions, RandomStream& tie_break);

/// Distribution of the number of correct members: result[k] = P(k correct).
/// O(n^2) dynamic program over heterogeneous Bernoulli trials.
[[nodiscard]] std::vector<double> correct_count_distribution(std::span<const double> competences);

/// Probability that the unweighted majority of independent members with
/// the given competences equals the label. A tie counts one half.
[[nodiscard]] double committee_correct_prob(std::span<const double> competences);

/// p_i p_C + (1 - p_i)(1 - p_C): probability that an expert outside the
/// committee agrees with the committee's majority.
[[nodiscard]] constexpr double pseudo_competence_exact(double p_i, double p_committee) noexcept {
    return p_i * p_committee + (1.0 - p_i) * (1.0 - p_committee);
}

/// (2 p_C - 1)(p_i - p_j), the pseudo-competence gap between two outsiders.
[[nodiscard]] constexpr double pseudo_gap(double p_i, double p_j, double p_committee) noexcept {
    return (2.0 * p_committee - 1.0) * (p_i - p_j);
}

/// Pseudo competence of committee member `expert` measured against the
/// majority of the remaining members.
[[nodiscard]] PseudoCompetence leave_one_out_pseudo(ExpertIndex expert, const Committee& committee);

enum class OrderingResult { Preserved, Violated, Indeterminate };

inline constexpr double kIndeterminateTolerance = 1e-12;

/// Whether pseudo competences measured against `committee` rank every pair
/// of non-members the same way their true competences do. Indeterminate
/// when p_C is within 1e-12 of one half.
[[nodiscard]] OrderingResult ordering_preserved(const CompetenceProfile& profile,
                                                std::span<const ExpertIndex> committee);

/// Same check for the members themselves, each judged by its leave-one-out
/// pseudo competence. This is not guaranteed to hold, so callers verify it
/// per instance.
[[nodiscard]] bool in_committee_ordering_preserved(const Committee& committee);

}  // namespace bee
