#include "bee/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "bee/bandit_engine.hpp"
#include "bee/committee_math.hpp"
#include "bee/regret_metrics.hpp"

namespace bee {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

struct CellResult {
    double realized = 0.0;
    double pseudo = 0.0;
    double baseline = 0.0;
    std::string trace_rows;
    std::vector<std::string> warnings;
};

/// Accepts results in any order and writes them out in index order.
class OrderedWriter {
public:
    OrderedWriter(std::ofstream& out, std::size_t count) : out_(out), pending_(count) {}

    void submit(std::size_t index, std::string text) {
        std::lock_guard lock(mutex_);
        pending_[index] = std::move(text);
        while (next_ < pending_.size() && pending_[next_]) {
            out_ << *pending_[next_];
            pending_[next_].reset();
            ++next_;
        }
    }

private:
    std::ofstream& out_;
    std::vector<std::optional<std::string>> pending_;
    std::size_t next_ = 0;
    std::mutex mutex_;
};

}  // namespace

std::string format_real(double value) {
    if (value == 0.0) value = 0.0;  // drop the sign of negative zero
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

std::vector<std::uint64_t> checkpoint_rounds(std::uint64_t horizon) {
    std::set<std::uint64_t> rounds;
    for (int k = 0;; ++k) {
        const auto r = static_cast<std::uint64_t>(std::floor(std::pow(10.0, k / 10.0) + 1e-9));
        if (r > horizon) break;
        rounds.insert(r);
    }
    rounds.insert(horizon);
    return {rounds.begin(), rounds.end()};
}

CompetenceProfile profile_for_replication(const ExperimentConfig& config, std::size_t replication) {
    const WorldSeed seed{config.master_seed, config.fixed_profile ? 0 : replication};
    return CompetenceProfile::draw_uniform(config.expert_count, config.competence_low,
                                           config.competence_high, seed);
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& task) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    const auto body = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    }
    if (error) std::rethrow_exception(error);
}

SweepResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.mode == ExperimentMode::FixedCommitteeLemma) {
        throw ConfigError("mode", "use run_lemma_validation for fixed-committee-lemma");
    }
    const bool swarm = config.mode == ExperimentMode::Swarm;
    const std::string mode = mode_name(config.mode);
    const auto specs = config.policy_specs();
    const std::size_t reps = config.replications;
    const std::size_t n_m = config.m_values.size();

    std::vector<CompetenceProfile> profiles;
    profiles.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) profiles.push_back(profile_for_replication(config, r));

    // Oracle committee accuracy per (replication, m); SWARM baseline only.
    std::vector<double> oracle(reps * n_m, 0.0);
    if (swarm) {
        parallel_for(reps * n_m, config.workers, [&](std::size_t k) {
            const std::size_t r = k / n_m;
            const std::size_t m = config.m_values[k % n_m];
            const std::uint64_t key = WorldSeed{config.master_seed, r}.key(Stream::OracleMonteCarlo, m);
            oracle[k] = oracle_committee_accuracy(profiles[r], m, key).value;
        });
    }

    ensure_directory(config.output_directory);
    SweepResult result;
    result.summary_path = config.output_directory / "summary.csv";
    result.trace_path = config.output_directory / "trace.csv";
    std::ofstream trace_out = open_output(result.trace_path);
    trace_out << kTraceHeader << '\n';

    const std::size_t cells = specs.size() * n_m * reps;
    std::vector<CellResult> results(cells);
    OrderedWriter writer(trace_out, cells);
    const auto checkpoints = checkpoint_rounds(config.horizon);

    parallel_for(cells, config.workers, [&](std::size_t cell) {
        const std::size_t r = cell % reps;
        const std::size_t mi = (cell / reps) % n_m;
        const std::size_t pi = cell / (reps * n_m);
        const std::size_t m = config.m_values[mi];
        const PolicySpec& spec = specs[pi];

        World world(profiles[r], WorldSeed{config.master_seed, r});
        const RunTrace trace = swarm ? run_swarm(world, spec, m, config.horizon)
                                     : run_bee(world, spec, m, config.horizon);
        const double baseline = swarm ? oracle[r * n_m + mi]
                                      : profiles[r][best_expert(profiles[r])];
        const RegretCurves curves = regret_curves(trace, world, baseline);
        const double horizon = static_cast<double>(config.horizon);

        CellResult& out = results[cell];
        out.realized = curves.realized.back() / horizon;
        out.pseudo = curves.pseudo.back() / horizon;
        out.baseline = baseline;
        out.warnings = trace.warnings;

        std::ostringstream rows;
        const std::string prefix =
            mode + ',' + policy_name(spec) + ',' + std::to_string(m) + ',' + std::to_string(r) + ',';
        const auto emit = [&](std::uint64_t round) {
            const RoundOutcome& o = trace.rounds[round - 1];
            rows << prefix << round << ',' << o.leader << ',' << (o.decision == o.label ? 1 : 0)
                 << ',' << format_real(curves.realized[round - 1]) << ','
                 << format_real(curves.pseudo[round - 1]) << '\n';
        };
        if (config.full_trace) {
            for (std::uint64_t t = 1; t <= config.horizon; ++t) emit(t);
        } else {
            for (std::uint64_t t : checkpoints) emit(t);
        }
        writer.submit(cell, rows.str());
    });
    trace_out.close();
    if (!trace_out) throw std::runtime_error("failed writing " + result.trace_path.string());

    std::ofstream summary_out = open_output(result.summary_path);
    summary_out << kSummaryHeader << '\n';
    std::set<std::string> seen_warnings;
    for (std::size_t pi = 0; pi < specs.size(); ++pi) {
        for (std::size_t mi = 0; mi < n_m; ++mi) {
            std::vector<double> realized;
            std::vector<double> pseudo;
            double baseline = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                const CellResult& c = results[(pi * n_m + mi) * reps + r];
                realized.push_back(c.realized);
                pseudo.push_back(c.pseudo);
                baseline += c.baseline;
                for (const auto& w : c.warnings) {
                    if (seen_warnings.insert(w).second) result.warnings.push_back(w);
                }
            }
            const auto rs = summarize(realized);
            const auto ps = summarize(pseudo);
            SummaryRow row{mode,
                           policy_name(specs[pi]),
                           config.m_values[mi],
                           reps,
                           config.horizon,
                           config.expert_count,
                           rs.mean,
                           rs.stddev,
                           ps.mean,
                           ps.stddev,
                           baseline / static_cast<double>(reps)};
            summary_out << row.mode << ',' << row.policy << ',' << row.m << ',' << row.replications
                        << ',' << row.horizon << ',' << row.experts << ','
                        << format_real(row.realized_mean) << ',' << format_real(row.realized_std)
                        << ',' << format_real(row.pseudo_mean) << ',' << format_real(row.pseudo_std)
                        << ',' << format_real(row.baseline) << '\n';
            result.summary.push_back(std::move(row));
        }
    }
    summary_out.close();
    if (!summary_out) throw std::runtime_error("failed writing " + result.summary_path.string());
    return result;
}

LemmaScenario lemma_scenario(const ExperimentConfig& config) {
    std::vector<double> p(config.lemma_committee_size, config.lemma_committee_competence);
    p.push_back(config.lemma_candidate_best);
    const std::size_t others = config.lemma_candidates - 1;
    for (std::size_t k = 0; k < others; ++k) {
        const double frac = others == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(others - 1);
        const double gap = config.lemma_gap_low + frac * (config.lemma_gap_high - config.lemma_gap_low);
        p.push_back(config.lemma_candidate_best - gap);
    }
    LemmaScenario s{CompetenceProfile(std::move(p)), {}};
    for (ExpertIndex i = 0; i < config.lemma_committee_size; ++i) s.committee.push_back(i);
    return s;
}

LemmaResult run_lemma_validation(const ExperimentConfig& config) {
    config.validate();
    if (config.mode != ExperimentMode::FixedCommitteeLemma) {
        throw ConfigError("mode", "lemma validation requires mode fixed-committee-lemma");
    }
    const LemmaScenario scenario = lemma_scenario(config);
    const auto specs = config.policy_specs();
    const std::size_t reps = config.replications;
    std::vector<std::uint64_t> horizons;
    for (std::uint64_t h : checkpoint_rounds(config.horizon)) {
        if (h >= 10) horizons.push_back(h);
    }
    if (horizons.empty()) horizons.push_back(config.horizon);

    // regret[(policy * reps + rep) * H + h]
    std::vector<double> regret(specs.size() * reps * horizons.size(), 0.0);
    parallel_for(specs.size() * reps, config.workers, [&](std::size_t k) {
        const std::size_t pi = k / reps;
        const std::size_t r = k % reps;
        World world(scenario.profile, WorldSeed{config.master_seed, r});
        const auto trace = run_fixed_committee(world, specs[pi], scenario.committee, config.horizon);
        for (std::size_t h = 0; h < horizons.size(); ++h) {
            regret[k * horizons.size() + h] =
                fixed_committee_pseudo_regret(trace, scenario.profile, horizons[h]);
        }
    });

    ensure_directory(config.output_directory);
    LemmaResult result;
    result.lemma_path = config.output_directory / "lemma.csv";
    std::ofstream out = open_output(result.lemma_path);
    out << kLemmaHeader << '\n';
    for (std::size_t pi = 0; pi < specs.size(); ++pi) {
        for (std::size_t h = 0; h < horizons.size(); ++h) {
            const LemmaBound b = lemma_bound(scenario.profile, scenario.committee, specs[pi].kind,
                                             horizons[h], config.thompson_epsilon);
            double mean = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                mean += regret[(pi * reps + r) * horizons.size() + h];
            }
            mean /= static_cast<double>(reps);
            LemmaRow row{policy_name(specs[pi]),
                         scenario.committee.size(),
                         b.params.committee_correct,
                         horizons[h],
                         b.params.potential,
                         b.bound,
                         mean};
            out << row.policy << ',' << row.committee_size << ',' << format_real(row.p_committee)
                << ',' << row.horizon << ',' << format_real(row.phi) << ','
                << format_real(row.bound) << ',' << format_real(row.empirical_pseudo_regret) << '\n';
            result.rows.push_back(std::move(row));
        }
    }
    out.close();
    if (!out) throw std::runtime_error("failed writing " + result.lemma_path.string());
    return result;
}

std::vector<OracleRow> oracle_table(const ExperimentConfig& config) {
    config.validate();
    const CompetenceProfile profile = profile_for_replication(config, 0);
    std::vector<OracleRow> rows(config.m_values.size());
    parallel_for(rows.size(), config.workers, [&](std::size_t k) {
        const std::size_t m = config.m_values[k];
        const std::uint64_t key = WorldSeed{config.master_seed, 0}.key(Stream::OracleMonteCarlo, m);
        const OracleAccuracy acc = oracle_committee_accuracy(profile, m, key);
        rows[k] = {m, acc.value, acc.std_error, acc.exact};
    });
    return rows;
}

}  // namespace bee
