#include "bee/regret_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bee/committee_math.hpp"

namespace bee {

namespace {

// Relative threshold under which a weighted vote counts as tied.
constexpr double kTieTolerance = 1e-12;

std::vector<ExpertIndex> top_m(const CompetenceProfile& profile, std::size_t m) {
    std::vector<ExpertIndex> order(profile.expert_count());
    std::iota(order.begin(), order.end(), ExpertIndex{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](ExpertIndex a, ExpertIndex b) { return profile[a] > profile[b]; });
    order.resize(m);
    return order;
}

double max_competence(const CompetenceProfile& profile) {
    return profile[best_expert(profile)];
}

void enumerate_patterns(std::span<const double> p, std::span<const double> w, std::size_t k,
                        double prob, double sum, double scale, double& acc) {
    if (k == p.size()) {
        if (std::abs(sum) <= kTieTolerance * scale) {
            acc += 0.5 * prob;
        } else if (sum > 0.0) {
            acc += prob;
        }
        return;
    }
    enumerate_patterns(p, w, k + 1, prob * p[k], sum + w[k], scale, acc);
    enumerate_patterns(p, w, k + 1, prob * (1.0 - p[k]), sum - w[k], scale, acc);
}

void check_trace_against_world(const RunTrace& trace, const World& world) {
    if (trace.rounds.size() != world.rounds_issued()) {
        throw std::invalid_argument("trace length " + std::to_string(trace.rounds.size()) +
                                    " differs from rounds issued " +
                                    std::to_string(world.rounds_issued()));
    }
}

}  // namespace

ReplicationStats summarize(std::span<const double> values) {
    ReplicationStats s;
    s.count = values.size();
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    return s;
}

RegretCurves regret_curves(const RunTrace& trace, const World& world, double swarm_baseline) {
    check_trace_against_world(trace, world);
    const auto& profile = world.oracle_profile();
    const ExpertIndex best = best_expert(profile);
    const double p_best = profile[best];

    RegretCurves curves;
    curves.realized.reserve(trace.rounds.size());
    curves.pseudo.reserve(trace.rounds.size());
    double realized = 0.0;
    double pseudo = 0.0;
    for (const RoundOutcome& r : trace.rounds) {
        const double best_ok = world.oracle_correct(best, r.round) ? 1.0 : 0.0;
        const double decision_ok = r.decision == r.label ? 1.0 : 0.0;
        realized += best_ok - decision_ok;
        if (trace.algorithm == Algorithm::Bee) {
            pseudo += p_best - profile[r.leader];
        } else {
            pseudo += swarm_baseline - decision_ok;
        }
        curves.realized.push_back(realized);
        curves.pseudo.push_back(pseudo);
    }
    return curves;
}

RegretReport realized_regret(const RunTrace& trace, const World& world) {
    check_trace_against_world(trace, world);
    if (trace.rounds.empty()) throw std::invalid_argument("empty trace");
    RegretReport report;
    const auto curves = regret_curves(trace, world, 0.0);
    const double horizon = static_cast<double>(trace.rounds.size());
    report.normalized_realized = curves.realized.back() / horizon;
    report.per_round_cumulative = curves.realized;
    report.baseline = max_competence(world.oracle_profile());
    if (trace.algorithm == Algorithm::Bee) {
        report.normalized_pseudo = curves.pseudo.back() / horizon;
        report.per_round_cumulative_pseudo = curves.pseudo;
    }
    report.replication = {report.normalized_realized, 0.0, 1};
    return report;
}

double pseudo_regret_bee(const RunTrace& trace, const CompetenceProfile& profile) {
    if (trace.rounds.empty()) throw std::invalid_argument("empty trace");
    double chosen = 0.0;
    for (const RoundOutcome& r : trace.rounds) chosen += profile[r.leader];
    return max_competence(profile) - chosen / static_cast<double>(trace.rounds.size());
}

double weighted_vote_accuracy_exact(std::span<const double> competences) {
    if (competences.empty()) throw std::invalid_argument("empty committee");
    if (competences.size() > 30) throw std::invalid_argument("committee too large to enumerate");
    std::vector<double> w(competences.size());
    double scale = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = competences[k] - 0.5;
        scale += std::abs(w[k]);
    }
    double acc = 0.0;
    enumerate_patterns(competences, w, 0, 1.0, 0.0, scale, acc);
    return acc;
}

OracleAccuracy weighted_vote_accuracy_monte_carlo(std::span<const double> competences,
                                                  std::uint64_t samples, std::uint64_t key) {
    if (competences.empty()) throw std::invalid_argument("empty committee");
    if (samples == 0) throw std::invalid_argument("need at least one sample");
    std::vector<double> w(competences.size());
    std::vector<std::uint64_t> keys(competences.size());
    double scale = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = competences[k] - 0.5;
        scale += std::abs(w[k]);
        keys[k] = combine_keys(key, k);
    }
    double total = 0.0;
    double total_sq = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        double sum = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            sum += counter_uniform(keys[k], s) < competences[k] ? w[k] : -w[k];
        }
        const double outcome = std::abs(sum) <= kTieTolerance * scale ? 0.5 : (sum > 0.0 ? 1.0 : 0.0);
        total += outcome;
        total_sq += outcome * outcome;
    }
    const double n = static_cast<double>(samples);
    const double mean = total / n;
    const double var = std::max(total_sq / n - mean * mean, 0.0);
    return {mean, std::sqrt(var / n), false};
}

OracleAccuracy oracle_committee_accuracy(const CompetenceProfile& profile, std::size_t m,
                                         std::uint64_t mc_key) {
    if (m == 0 || m > profile.expert_count()) {
        throw std::invalid_argument("committee size must be in [1, expert count]");
    }
    std::vector<double> p;
    for (ExpertIndex i : top_m(profile, m)) p.push_back(profile[i]);
    if (m <= kOracleEnumerationLimit) return {weighted_vote_accuracy_exact(p), 0.0, true};
    return weighted_vote_accuracy_monte_carlo(p, kOracleMonteCarloSamples, mc_key);
}

double exhaustive_committee_accuracy(const CompetenceProfile& profile, std::size_t m) {
    const std::size_t n = profile.expert_count();
    if (m == 0 || m > n) throw std::invalid_argument("committee size must be in [1, expert count]");
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<double> p(m);
    double best = 0.0;
    while (true) {
        for (std::size_t k = 0; k < m; ++k) p[k] = profile[idx[k]];
        best = std::max(best, weighted_vote_accuracy_exact(p));
        // next combination in lexicographic order
        std::size_t k = m;
        while (k > 0 && idx[k - 1] == n - m + (k - 1)) --k;
        if (k == 0) break;
        ++idx[k - 1];
        for (std::size_t j = k; j < m; ++j) idx[j] = idx[j - 1] + 1;
    }
    return best;
}

RegretReport pseudo_regret_swarm(std::span<const RunTrace> traces, const CompetenceProfile& profile,
                                 std::size_t m, double oracle_accuracy) {
    if (traces.empty()) throw std::invalid_argument("need at least one replication");
    (void)profile;
    std::vector<double> per_rep;
    per_rep.reserve(traces.size());
    for (const RunTrace& trace : traces) {
        if (trace.m != m) throw std::invalid_argument("trace committee size differs from m");
        if (trace.rounds.empty()) throw std::invalid_argument("empty trace");
        double correct = 0.0;
        for (const RoundOutcome& r : trace.rounds) correct += r.decision == r.label ? 1.0 : 0.0;
        per_rep.push_back(oracle_accuracy - correct / static_cast<double>(trace.rounds.size()));
    }
    RegretReport report;
    report.baseline = oracle_accuracy;
    report.replication = summarize(per_rep);
    report.normalized_pseudo = report.replication.mean;
    return report;
}

double potential(const CompetenceProfile& profile, std::span<const ExpertIndex> committee,
                 std::uint64_t horizon) {
    if (horizon < 2) throw std::invalid_argument("potential needs horizon >= 2");
    const double p_max = max_competence(profile);
    double sum = 0.0;
    for (ExpertIndex i = 0; i < profile.expert_count(); ++i) {
        if (std::find(committee.begin(), committee.end(), i) != committee.end()) continue;
        const double gap = p_max - profile[i];
        if (gap > 0.0) sum += 1.0 / gap;
    }
    const double t = static_cast<double>(horizon);
    return std::log(t) / t * sum;
}

LemmaBound lemma_bound(const CompetenceProfile& profile, std::span<const ExpertIndex> committee,
                       PolicyKind kind, std::uint64_t horizon, double thompson_epsilon) {
    if (committee.empty()) throw std::invalid_argument("committee is empty");
    const Committee c = Committee::from_profile(profile, committee);
    LemmaBound out;
    BoundParams& bp = out.params;
    bp.committee_correct = committee_correct_prob(c.member_competences);
    if (!(bp.committee_correct > 0.5)) {
        throw std::invalid_argument("committee correctness p_C = " +
                                    std::to_string(bp.committee_correct) +
                                    " must exceed 1/2");
    }
    if (!(thompson_epsilon > 0.0)) throw std::invalid_argument("thompson epsilon must be positive");
    bp.horizon = horizon;
    bp.expert_count = profile.expert_count();
    bp.thompson_epsilon = thompson_epsilon;
    bp.potential = potential(profile, committee, horizon);

    const double p_max = max_competence(profile);
    for (ExpertIndex i = 0; i < profile.expert_count(); ++i) {
        if (std::find(committee.begin(), committee.end(), i) != committee.end()) continue;
        const double gap = p_max - profile[i];
        if (gap > 0.0) bp.gaps.push_back(gap);
    }

    const double contraction = 2.0 * bp.committee_correct - 1.0;
    const double t = static_cast<double>(horizon);
    const double experts = static_cast<double>(bp.expert_count);
    switch (kind) {
        case PolicyKind::Ucb1:
            bp.constant = 10.0;
            out.bound = bp.constant * bp.potential / contraction;
            break;
        case PolicyKind::KlUcb:
        case PolicyKind::Imed:
            bp.constant = 0.5;
            out.bound = bp.constant * bp.potential / contraction;
            break;
        case PolicyKind::Thompson:
            bp.constant = 1.0 + thompson_epsilon;
            // additive O(M / eps^2) term, normalized by T, unit constant
            out.bound = bp.constant * bp.potential / contraction +
                        experts / (thompson_epsilon * thompson_epsilon * t);
            break;
        case PolicyKind::Moss: {
            bp.constant = 23.0;
            double sum = 0.0;
            for (double gap : bp.gaps) {
                const double shrunk = contraction * gap;
                sum += std::max(std::log(t * shrunk * shrunk / experts), 1.0) / gap;
            }
            out.bound = bp.constant * experts / t * (sum / contraction);
            break;
        }
    }
    return out;
}

double fixed_committee_pseudo_regret(const FixedCommitteeTrace& trace,
                                     const CompetenceProfile& profile, std::uint64_t rounds) {
    if (rounds == 0 || rounds > trace.leaders.size()) {
        throw std::invalid_argument("rounds outside the trace");
    }
    const Committee c = Committee::from_profile(profile, trace.committee);
    const double p_c = committee_correct_prob(c.member_competences);
    double best = 0.0;
    for (ExpertIndex i : trace.candidates) {
        best = std::max(best, pseudo_competence_exact(profile[i], p_c));
    }
    double sum = 0.0;
    for (std::uint64_t t = 0; t < rounds; ++t) {
        sum += best - pseudo_competence_exact(profile[trace.leaders[t]], p_c);
    }
    return sum / static_cast<double>(rounds);
}

}  // namespace bee
