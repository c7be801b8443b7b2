#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bee/experiment_config.hpp"
#include "bee/world.hpp"

namespace bee {

inline constexpr const char* kSummaryHeader =
    "mode,policy,m,replications,horizon,experts,realized_regret_mean,realized_regret_std,"
    "pseudo_regret_mean,pseudo_regret_std,baseline";
inline constexpr const char* kTraceHeader =
    "mode,policy,m,replication,round,leader,decision_correct,cum_realized_regret,"
    "cum_pseudo_regret";
inline constexpr const char* kLemmaHeader =
    "policy,committee_size,p_committee,horizon,phi,bound,empirical_pseudo_regret";

/// Fixed nine-significant-digit rendering used in every CSV.
[[nodiscard]] std::string format_real(double value);

/// Rounds at which decimated traces are written: ten per decade, plus the
/// final round.
[[nodiscard]] std::vector<std::uint64_t> checkpoint_rounds(std::uint64_t horizon);

/// Competences for a replication: redrawn per replication unless the config
/// pins one profile, in which case replication 0's draw is shared.
[[nodiscard]] CompetenceProfile profile_for_replication(const ExperimentConfig& config,
                                                        std::size_t replication);

/// Runs `task(i)` for i in [0, count) on up to `workers` threads (0 means one
/// per hardware thread). The first exception thrown by a task is rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& task);

struct SummaryRow {
    std::string mode;
    std::string policy;
    std::size_t m = 0;
    std::size_t replications = 0;
    std::uint64_t horizon = 0;
    std::size_t experts = 0;
    double realized_mean = 0.0;
    double realized_std = 0.0;
    double pseudo_mean = 0.0;
    double pseudo_std = 0.0;
    double baseline = 0.0;
};

struct SweepResult {
    std::vector<SummaryRow> summary;
    std::filesystem::path summary_path;
    std::filesystem::path trace_path;
    std::vector<std::string> warnings;
};

/// BEE or SWARM sweep over (policy, m, replication). Writes summary.csv and
/// trace.csv into the output directory. Output bytes depend only on the
/// configuration, not on the worker count.
SweepResult run_experiment(const ExperimentConfig& config);

struct LemmaRow {
    std::string policy;
    std::size_t committee_size = 0;
    double p_committee = 0.0;
    std::uint64_t horizon = 0;
    double phi = 0.0;
    double bound = 0.0;
    double empirical_pseudo_regret = 0.0;
};

struct LemmaScenario {
    CompetenceProfile profile;
    std::vector<ExpertIndex> committee;
};

/// Committee members first (all at the committee competence), then the
/// candidates: the best one, followed by candidates whose gaps to it are
/// evenly spaced over [gap_low, gap_high].
[[nodiscard]] LemmaScenario lemma_scenario(const ExperimentConfig& config);

struct LemmaResult {
    std::vector<LemmaRow> rows;
    std::filesystem::path lemma_path;
};

/// Pins the peer committee, lets each policy pick a leader among the other
/// experts, and compares the replication-averaged agreement-space pseudo
/// regret with the bound at each checkpoint horizon. Writes lemma.csv.
LemmaResult run_lemma_validation(const ExperimentConfig& config);

struct OracleRow {
    std::size_t m = 0;
    double accuracy = 0.0;
    double std_error = 0.0;
    bool exact = true;
};

/// Oracle committee accuracy for every configured m, on replication 0's profile.
[[nodiscard]] std::vector<OracleRow> oracle_table(const ExperimentConfig& config);

}  // namespace bee
