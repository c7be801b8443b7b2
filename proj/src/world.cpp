#include "bee/world.hpp"

#include <stdexcept>
#include <string>

namespace bee {

CompetenceProfile::CompetenceProfile(std::vector<double> competences)
    : competences_(std::move(competences)) {
    if (competences_.empty()) {
        throw std::invalid_argument("competence profile is empty");
    }
    for (std::size_t i = 0; i < competences_.size(); ++i) {
        const double p = competences_[i];
        if (!(p > 0.0 && p < 1.0)) {
            throw std::invalid_argument("competence of expert " + std::to_string(i) +
                                        " outside (0,1): " + std::to_string(p));
        }
    }
}

CompetenceProfile CompetenceProfile::draw_uniform(std::size_t expert_count, double low,
                                                  double high, const WorldSeed& seed) {
    if (!(low < high)) {
        throw std::invalid_argument("competence range must satisfy low < high");
    }
    std::vector<double> p(expert_count);
    const std::uint64_t key = seed.key(Stream::Profile);
    for (std::size_t i = 0; i < expert_count; ++i) {
        p[i] = low + (high - low) * counter_uniform(key, i);
        // keep the draw inside the open interval the type requires
        if (p[i] <= 0.0) p[i] = 0x1.0p-53;
        if (p[i] >= 1.0) p[i] = 1.0 - 0x1.0p-53;
    }
    return CompetenceProfile(std::move(p));
}

ExpertIndex best_expert(const CompetenceProfile& profile) {
    const auto p = profile.competences();
    ExpertIndex best = 0;
    for (ExpertIndex i = 1; i < p.size(); ++i) {
        if (p[i] > p[best]) best = i;
    }
    return best;
}

World::World(CompetenceProfile profile, WorldSeed seed)
    : profile_(std::move(profile)), seed_(seed), label_key_(seed.key(Stream::TaskLabels)) {
    if (profile_.expert_count() < 2) {
        throw std::invalid_argument("world needs at least two experts");
    }
    expert_keys_.reserve(profile_.expert_count());
    for (ExpertIndex i = 0; i < profile_.expert_count(); ++i) {
        expert_keys_.push_back(seed.key(Stream::ExpertOpinions, i));
    }
}

TaskRecord World::sample_round(std::span<const ExpertIndex> committee) {
    if (committee.empty()) {
        throw std::invalid_argument("committee is empty");
    }
    for (ExpertIndex i : committee) {
        if (i >= expert_keys_.size()) {
            throw std::out_of_range("expert index " + std::to_string(i) + " out of range");
        }
    }
    ++round_;
    TaskRecord rec;
    rec.round = round_;
    rec.label = oracle_label(round_);
    rec.committee.assign(committee.begin(), committee.end());
    rec.opinions.reserve(committee.size());
    rec.correctness.reserve(committee.size());
    for (ExpertIndex i : committee) {
        const bool ok = oracle_correct(i, round_);
        rec.correctness.push_back(ok ? 1 : 0);
        rec.opinions.push_back(ok ? rec.label : -rec.label);
    }
    return rec;
}

Opinion World::oracle_label(std::uint64_t round) const noexcept {
    return counter_uniform(label_key_, round) < 0.5 ? 1 : -1;
}

bool World::oracle_correct(ExpertIndex expert, std::uint64_t round) const {
    return counter_uniform(expert_keys_.at(expert), round) < profile_[expert];
}

Opinion World::oracle_opinion(ExpertIndex expert, std::uint64_t round) const {
    const Opinion y = oracle_label(round);
    return oracle_correct(expert, round) ? y : -y;
}

}  // namespace bee
