#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bee/random.hpp"

namespace bee {

using ExpertIndex = std::size_t;
using Opinion = int;  // -1 or +1

/// Ground-truth reliabilities. Hidden from policies; only oracles and
/// metrics read it.
class CompetenceProfile {
public:
    CompetenceProfile() = default;
    explicit CompetenceProfile(std::vector<double> competences);

    [[nodiscard]] std::size_t expert_count() const noexcept { return competences_.size(); }
    [[nodiscard]] double operator[](ExpertIndex i) const { return competences_.at(i); }
    [[nodiscard]] std::span<const double> competences() const noexcept { return competences_; }

    /// Competences drawn i.i.d. from U[low, high) using the replication's
    /// profile substream.
    static CompetenceProfile draw_uniform(std::size_t expert_count, double low, double high,
                                          const WorldSeed& seed);

private:
    std::vector<double> competences_;
};

/// argmax_i p_i, lowest index on ties.
[[nodiscard]] ExpertIndex best_expert(const CompetenceProfile& profile);

struct TaskRecord {
    std::uint64_t round = 0;
    Opinion label = 1;
    std::vector<ExpertIndex> committee;
    std::vector<Opinion> opinions;          // aligned with committee
    std::vector<std::uint8_t> correctness;  // aligned with committee
};

/// Task and opinion generator.
///
/// Labels are uniform on {-1,+1} and independent across rounds. Expert i
/// agrees with the label with probability p_i, independently of the other
/// experts given the label. Every draw is a pure function of
/// (seed, stream, expert, round), so an expert's opinion on task t does not
/// depend on who else was consulted or on which policy is running, and
/// opinions are only materialized for consulted experts.
class World {
public:
    World(CompetenceProfile profile, WorldSeed seed);

    /// Issues the next task and returns the committee's opinions on it.
    TaskRecord sample_round(std::span<const ExpertIndex> committee);

    [[nodiscard]] std::uint64_t rounds_issued() const noexcept { return round_; }
    [[nodiscard]] std::size_t expert_count() const noexcept { return profile_.expert_count(); }
    [[nodiscard]] const WorldSeed& seed() const noexcept { return seed_; }

    // Oracle view. Metrics only.
    [[nodiscard]] const CompetenceProfile& oracle_profile() const noexcept { return profile_; }
    [[nodiscard]] Opinion oracle_label(std::uint64_t round) const noexcept;
    [[nodiscard]] bool oracle_correct(ExpertIndex expert, std::uint64_t round) const;
    [[nodiscard]] Opinion oracle_opinion(ExpertIndex expert, std::uint64_t round) const;

private:
    CompetenceProfile profile_;
    WorldSeed seed_;
    std::uint64_t label_key_;
    std::vector<std::uint64_t> expert_keys_;
    std::uint64_t round_ = 0;
};

}  // namespace bee
