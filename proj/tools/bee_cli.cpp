// Command-line front end for the BEE / SWARM experiment harness.
//
//   bee run      --mode bee|swarm ...   sweep over policies, m and replications
//   bee lemma    ...                    fixed-committee bound validation
//   bee validate ...                    resolve and check a configuration
//   bee oracle   ...                    oracle committee accuracy table

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bee/experiment.hpp"
#include "bee/experiment_config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
    std::string config_path;
    std::optional<std::string> mode;
    std::optional<std::size_t> experts;
    std::optional<std::uint64_t> horizon;
    std::optional<double> comp_low;
    std::optional<double> comp_high;
    std::vector<std::size_t> m_values;
    std::vector<std::string> policies;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool fixed_profile = false;
    bool full_trace = false;
    std::optional<std::size_t> workers;
    std::optional<std::string> klucb_variant;
    std::optional<double> klucb_c;
    std::optional<double> thompson_epsilon;
    std::optional<std::size_t> committee_size;
    std::optional<double> committee_competence;
};

void add_options(CLI::App& app, Overrides& o) {
    app.add_option("--config", o.config_path, "JSON configuration file");
    app.add_option("--mode", o.mode, "bee or swarm");
    app.add_option("--experts", o.experts, "number of experts M");
    app.add_option("--horizon", o.horizon, "number of tasks T");
    app.add_option("--comp-low", o.comp_low, "lower end of the competence range");
    app.add_option("--comp-high", o.comp_high, "upper end of the competence range");
    app.add_option("--m", o.m_values, "committee size (repeatable)");
    app.add_option("--policy", o.policies, "ucb1, klucb, klucb+, imed, moss, thompson (repeatable)");
    app.add_option("--reps", o.reps, "replications");
    app.add_option("--seed", o.seed, "master seed");
    app.add_option("--out", o.out, "output directory");
    app.add_flag("--fixed-profile", o.fixed_profile, "share one competence profile across replications");
    app.add_flag("--full-trace", o.full_trace, "write every round to trace.csv");
    app.add_option("--workers", o.workers, "worker threads (0: hardware concurrency)");
    app.add_option("--klucb-variant", o.klucb_variant, "plus or plain");
    app.add_option("--klucb-c", o.klucb_c, "c in ln t + c ln ln t");
    app.add_option("--thompson-epsilon", o.thompson_epsilon, "epsilon of the Thompson bound");
    app.add_option("--committee-size", o.committee_size, "lemma: pinned committee size");
    app.add_option("--committee-competence", o.committee_competence, "lemma: member competence");
}

bee::ExperimentConfig resolve(const Overrides& o) {
    bee::ExperimentConfig c;
    if (!o.config_path.empty()) c = bee::load_config_file(o.config_path, c);
    if (o.mode) c.mode = bee::parse_mode(*o.mode);
    if (o.experts) c.expert_count = *o.experts;
    if (o.horizon) c.horizon = *o.horizon;
    if (o.comp_low) c.competence_low = *o.comp_low;
    if (o.comp_high) c.competence_high = *o.comp_high;
    if (!o.m_values.empty()) c.m_values = o.m_values;
    if (!o.policies.empty()) c.policies = o.policies;
    if (o.reps) c.replications = *o.reps;
    if (o.seed) c.master_seed = *o.seed;
    if (o.out) c.output_directory = *o.out;
    if (o.fixed_profile) c.fixed_profile = true;
    if (o.full_trace) c.full_trace = true;
    if (o.workers) c.workers = *o.workers;
    if (o.klucb_variant) c.klucb_variant = *o.klucb_variant;
    if (o.klucb_c) c.klucb_c = *o.klucb_c;
    if (o.thompson_epsilon) c.thompson_epsilon = *o.thompson_epsilon;
    if (o.committee_size) c.lemma_committee_size = *o.committee_size;
    if (o.committee_competence) c.lemma_committee_competence = *o.committee_competence;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind exploration-exploitation over stochastic experts"};
    app.require_subcommand(1);
    Overrides o;
    auto* run = app.add_subcommand("run", "BEE or SWARM sweep");
    auto* lemma = app.add_subcommand("lemma", "fixed-committee bound validation");
    auto* validate = app.add_subcommand("validate", "check a configuration and print it resolved");
    auto* oracle = app.add_subcommand("oracle", "print the oracle committee accuracy table");
    for (auto* sub : {run, lemma, validate, oracle}) add_options(*sub, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        bee::ExperimentConfig config = resolve(o);
        if (*lemma) {
            config.mode = bee::ExperimentMode::FixedCommitteeLemma;
        } else if ((*run || *oracle) && config.mode == bee::ExperimentMode::FixedCommitteeLemma) {
            throw bee::ConfigError("mode", "use the lemma subcommand for fixed-committee-lemma");
        }
        config.validate();

        if (*validate) {
            std::cout << bee::config_to_json(config) << '\n';
            return 0;
        }
        if (*oracle) {
            std::cout << "m,oracle_accuracy,std_error,method\n";
            for (const auto& row : bee::oracle_table(config)) {
                std::cout << row.m << ',' << bee::format_real(row.accuracy) << ','
                          << bee::format_real(row.std_error) << ','
                          << (row.exact ? "enumeration" : "monte-carlo") << '\n';
            }
            return 0;
        }
        if (*lemma) {
            const auto result = bee::run_lemma_validation(config);
            std::cerr << "wrote " << result.lemma_path.string() << '\n';
            return 0;
        }
        const auto result = bee::run_experiment(config);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
        std::cerr << "wrote " << result.summary_path.string() << " and "
                  << result.trace_path.string() << '\n';
        return 0;
    } catch (const bee::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
