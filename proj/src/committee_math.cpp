#include "bee/committee_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bee {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

void check_open_unit(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("competence outside (0,1): " + std::to_string(p));
    }
}

}  // namespace

Committee Committee::from_profile(const CompetenceProfile& profile,
                                  std::span<const ExpertIndex> members) {
    Committee c;
    c.members.assign(members.begin(), members.end());
    c.member_competences.reserve(members.size());
    for (ExpertIndex i : members) c.member_competences.push_back(profile[i]);
    return c;
}

Opinion majority_vote(std::span<const Opinion> opinions, RandomStream& tie_break) {
    if (opinions.empty()) {
        throw std::invalid_argument("majority vote over an empty set of opinions");
    }
    long sum = 0;
    for (Opinion x : opinions) sum += x;
    if (sum > 0) return 1;
    if (sum < 0) return -1;
    return tie_break.coin();
}

std::vector<double> correct_count_distribution(std::span<const double> competences) {
    std::vector<double> dist(competences.size() + 1, 0.0);
    dist[0] = 1.0;
    std::size_t n = 0;
    for (double p : competences) {
        ++n;
        for (std::size_t k = n; k > 0; --k) {
            dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
        }
        dist[0] *= (1.0 - p);
    }
    return dist;
}

double committee_correct_prob(std::span<const double> competences) {
    if (competences.empty()) {
        throw std::invalid_argument("committee is empty");
    }
    for (double p : competences) check_open_unit(p);
    const auto dist = correct_count_distribution(competences);
    const std::size_t n = competences.size();
    double prob = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        if (2 * k > n) {
            prob += dist[k];
        } else if (2 * k == n) {
            prob += 0.5 * dist[k];
        }
    }
    return std::clamp(prob, 0.0, 1.0);
}

PseudoCompetence leave_one_out_pseudo(ExpertIndex expert, const Committee& committee) {
    if (committee.size() < 2) {
        throw std::invalid_argument("leave-one-out pseudo competence needs at least two members");
    }
    const auto it = std::find(committee.members.begin(), committee.members.end(), expert);
    if (it == committee.members.end()) {
        throw std::invalid_argument("expert " + std::to_string(expert) + " is not in the committee");
    }
    const auto pos = static_cast<std::size_t>(it - committee.members.begin());
    std::vector<double> peers;
    peers.reserve(committee.size() - 1);
    for (std::size_t k = 0; k < committee.size(); ++k) {
        if (k != pos) peers.push_back(committee.member_competences[k]);
    }
    const double p_i = committee.member_competences[pos];
    check_open_unit(p_i);
    return {pseudo_competence_exact(p_i, committee_correct_prob(peers)),
            PseudoBasis::LeaveOneOutExact};
}

OrderingResult ordering_preserved(const CompetenceProfile& profile,
                                  std::span<const ExpertIndex> committee) {
    const Committee c = Committee::from_profile(profile, committee);
    const double p_c = committee_correct_prob(c.member_competences);
    if (std::abs(p_c - 0.5) <= kIndeterminateTolerance) {
        return OrderingResult::Indeterminate;
    }
    std::vector<double> outsiders;
    for (ExpertIndex i = 0; i < profile.expert_count(); ++i) {
        if (std::find(committee.begin(), committee.end(), i) == committee.end()) {
            outsiders.push_back(profile[i]);
        }
    }
    for (std::size_t a = 0; a < outsiders.size(); ++a) {
        for (std::size_t b = a + 1; b < outsiders.size(); ++b) {
            const double gap = pseudo_competence_exact(outsiders[a], p_c) -
                               pseudo_competence_exact(outsiders[b], p_c);
            if (sign_of(gap) != sign_of(outsiders[a] - outsiders[b])) {
                return OrderingResult::Violated;
            }
        }
    }
    return OrderingResult::Preserved;
}

bool in_committee_ordering_preserved(const Committee& committee) {
    std::vector<double> pseudo;
    pseudo.reserve(committee.size());
    for (ExpertIndex i : committee.members) {
        pseudo.push_back(leave_one_out_pseudo(i, committee).value);
    }
    const auto& p = committee.member_competences;
    for (std::size_t a = 0; a < p.size(); ++a) {
        for (std::size_t b = a + 1; b < p.size(); ++b) {
            // equal competences give equal pseudo competences up to round-off
            if (p[a] == p[b]) continue;
            if (sign_of(pseudo[a] - pseudo[b]) != sign_of(p[a] - p[b])) return false;
        }
    }
    return true;
}

}  // namespace bee
