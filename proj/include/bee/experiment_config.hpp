#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "bee/index_policies.hpp"

namespace bee {

enum class ExperimentMode { Bee, Swarm, FixedCommitteeLemma };

[[nodiscard]] std::string mode_name(ExperimentMode mode);
[[nodiscard]] ExperimentMode parse_mode(const std::string& name);

/// Invalid configuration. `field` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::Bee;
    std::size_t expert_count = 100;
    std::uint64_t horizon = 100'000;
    double competence_low = 0.5;
    double competence_high = 0.75;
    std::vector<std::size_t> m_values{2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24};
    std::vector<std::string> policies{"ucb1", "klucb", "imed", "moss", "thompson"};
    std::size_t replications = 20;
    std::uint64_t master_seed = 20'240'601;
    std::filesystem::path output_directory = "results";
    std::string klucb_variant = "plus";  // plus | plain
    double klucb_c = 0.0;
    double thompson_epsilon = 0.2;
    bool fixed_profile = false;
    bool full_trace = false;
    std::size_t workers = 0;  // 0: one per hardware thread

    // fixed-committee validation scenario
    std::size_t lemma_committee_size = 5;
    double lemma_committee_competence = 0.7;
    std::size_t lemma_candidates = 10;
    double lemma_candidate_best = 0.75;
    double lemma_gap_low = 0.05;
    double lemma_gap_high = 0.2;

    /// Throws ConfigError naming the first offending field.
    void validate() const;

    /// Policy specs with horizon, expert count and KL-UCB settings filled in.
    [[nodiscard]] std::vector<PolicySpec> policy_specs() const;
};

/// Applies the keys of a JSON document on top of `base`. Unknown keys and
/// ill-typed values are rejected. Does not validate ranges.
[[nodiscard]] ExperimentConfig apply_config_json(const std::string& json_text,
                                                 ExperimentConfig base = {});

[[nodiscard]] ExperimentConfig load_config_file(const std::filesystem::path& path,
                                                ExperimentConfig base = {});

/// Resolved configuration as JSON, keys named after the fields.
[[nodiscard]] std::string config_to_json(const ExperimentConfig& config);

}  // namespace bee
