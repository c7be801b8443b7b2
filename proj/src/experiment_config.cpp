#include "bee/experiment_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bee/committee_math.hpp"

namespace bee {

namespace {

using nlohmann::json;

template <class T>
T read_value(const json& doc, const std::string& key) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(key, std::string("wrong type: ") + e.what());
    }
}

template <class T>
void read_unsigned(const json& doc, const std::string& key, T& out) {
    const json& v = doc.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(key, "expected a non-negative integer");
    out = v.get<T>();
}

}  // namespace

std::string mode_name(ExperimentMode mode) {
    switch (mode) {
        case ExperimentMode::Bee: return "bee";
        case ExperimentMode::Swarm: return "swarm";
        case ExperimentMode::FixedCommitteeLemma: return "fixed-committee-lemma";
    }
    return "unknown";
}

ExperimentMode parse_mode(const std::string& name) {
    if (name == "bee") return ExperimentMode::Bee;
    if (name == "swarm") return ExperimentMode::Swarm;
    if (name == "fixed-committee-lemma" || name == "lemma") return ExperimentMode::FixedCommitteeLemma;
    throw ConfigError("mode", "unknown mode '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (expert_count < 2) throw ConfigError("expert_count", "need at least 2 experts");
    if (horizon < 1) throw ConfigError("horizon", "must be at least 1");
    if (!(competence_low >= 0.5 && competence_low < competence_high && competence_high <= 1.0)) {
        throw ConfigError("competence_low", "need 0.5 <= competence_low < competence_high <= 1");
    }
    if (replications < 1) throw ConfigError("replications", "must be at least 1");
    if (policies.empty()) throw ConfigError("policies", "at least one policy required");
    for (const auto& p : policies) {
        try {
            (void)parse_policy(p);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("policies", e.what());
        }
    }
    if (klucb_variant != "plus" && klucb_variant != "plain") {
        throw ConfigError("klucb_variant", "expected 'plus' or 'plain'");
    }
    if (klucb_c < 0.0) throw ConfigError("klucb_c", "must be non-negative");
    if (!(thompson_epsilon > 0.0)) throw ConfigError("thompson_epsilon", "must be positive");

    if (mode != ExperimentMode::FixedCommitteeLemma) {
        if (m_values.empty()) throw ConfigError("m_values", "at least one committee size required");
        for (std::size_t m : m_values) {
            if (m < 2 || m > expert_count) {
                throw ConfigError("m_values", "committee size " + std::to_string(m) +
                                                  " outside [2, expert_count=" +
                                                  std::to_string(expert_count) + "]");
            }
        }
        return;
    }

    if (lemma_committee_size < 1) throw ConfigError("lemma_committee_size", "must be positive");
    if (lemma_candidates < 1) throw ConfigError("lemma_candidates", "must be positive");
    const auto in_open_unit = [](double p) { return p > 0.0 && p < 1.0; };
    if (!in_open_unit(lemma_committee_competence)) {
        throw ConfigError("lemma_committee_competence", "must lie in (0,1)");
    }
    if (!in_open_unit(lemma_candidate_best)) {
        throw ConfigError("lemma_candidate_best", "must lie in (0,1)");
    }
    if (!(lemma_gap_low > 0.0 && lemma_gap_low <= lemma_gap_high &&
          lemma_candidate_best - lemma_gap_high > 0.0)) {
        throw ConfigError("lemma_gap_low",
                          "need 0 < gap_low <= gap_high < lemma_candidate_best");
    }
    const std::vector<double> committee(lemma_committee_size, lemma_committee_competence);
    const double p_c = committee_correct_prob(committee);
    if (!(p_c > 0.5)) {
        throw ConfigError("lemma_committee_competence",
                          "committee correctness p_C = " + std::to_string(p_c) +
                              " must exceed 1/2");
    }
}

std::vector<PolicySpec> ExperimentConfig::policy_specs() const {
    const KlUcbBudget budget = klucb_variant == "plain" ? KlUcbBudget::Plain : KlUcbBudget::Plus;
    std::vector<PolicySpec> specs;
    for (const auto& name : policies) {
        PolicySpec spec = parse_policy(name, budget);
        spec.horizon = horizon;
        spec.expert_count = mode == ExperimentMode::FixedCommitteeLemma ? lemma_candidates
                                                                        : expert_count;
        spec.klucb_c = klucb_c;
        specs.push_back(spec);
    }
    return specs;
}

ExperimentConfig apply_config_json(const std::string& json_text, ExperimentConfig base) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config", "top level must be an object");

    ExperimentConfig c = std::move(base);
    for (const auto& [key, value] : doc.items()) {
        if (key == "mode") {
            c.mode = parse_mode(read_value<std::string>(doc, key));
        } else if (key == "expert_count") {
            read_unsigned(doc, key, c.expert_count);
        } else if (key == "horizon") {
            read_unsigned(doc, key, c.horizon);
        } else if (key == "competence_low") {
            c.competence_low = read_value<double>(doc, key);
        } else if (key == "competence_high") {
            c.competence_high = read_value<double>(doc, key);
        } else if (key == "m_values") {
            if (!value.is_array()) throw ConfigError(key, "expected an array");
            c.m_values.clear();
            for (const auto& v : value) {
                if (!v.is_number_unsigned()) throw ConfigError(key, "expected non-negative integers");
                c.m_values.push_back(v.get<std::size_t>());
            }
        } else if (key == "policies") {
            c.policies = read_value<std::vector<std::string>>(doc, key);
        } else if (key == "replications") {
            read_unsigned(doc, key, c.replications);
        } else if (key == "master_seed") {
            read_unsigned(doc, key, c.master_seed);
        } else if (key == "output_directory") {
            c.output_directory = read_value<std::string>(doc, key);
        } else if (key == "klucb_variant") {
            c.klucb_variant = read_value<std::string>(doc, key);
        } else if (key == "klucb_c") {
            c.klucb_c = read_value<double>(doc, key);
        } else if (key == "thompson_epsilon") {
            c.thompson_epsilon = read_value<double>(doc, key);
        } else if (key == "fixed_profile") {
            c.fixed_profile = read_value<bool>(doc, key);
        } else if (key == "full_trace") {
            c.full_trace = read_value<bool>(doc, key);
        } else if (key == "workers") {
            read_unsigned(doc, key, c.workers);
        } else if (key == "lemma_committee_size") {
            read_unsigned(doc, key, c.lemma_committee_size);
        } else if (key == "lemma_committee_competence") {
            c.lemma_committee_competence = read_value<double>(doc, key);
        } else if (key == "lemma_candidates") {
            read_unsigned(doc, key, c.lemma_candidates);
        } else if (key == "lemma_candidate_best") {
            c.lemma_candidate_best = read_value<double>(doc, key);
        } else if (key == "lemma_gap_low") {
            c.lemma_gap_low = read_value<double>(doc, key);
        } else if (key == "lemma_gap_high") {
            c.lemma_gap_high = read_value<double>(doc, key);
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    return c;
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return apply_config_json(text.str(), std::move(base));
}

std::string config_to_json(const ExperimentConfig& c) {
    json doc;
    doc["mode"] = mode_name(c.mode);
    doc["expert_count"] = c.expert_count;
    doc["horizon"] = c.horizon;
    doc["competence_low"] = c.competence_low;
    doc["competence_high"] = c.competence_high;
    doc["m_values"] = c.m_values;
    doc["policies"] = c.policies;
    doc["replications"] = c.replications;
    doc["master_seed"] = c.master_seed;
    doc["output_directory"] = c.output_directory.string();
    doc["klucb_variant"] = c.klucb_variant;
    doc["klucb_c"] = c.klucb_c;
    doc["thompson_epsilon"] = c.thompson_epsilon;
    doc["fixed_profile"] = c.fixed_profile;
    doc["full_trace"] = c.full_trace;
    doc["workers"] = c.workers;
    doc["lemma_committee_size"] = c.lemma_committee_size;
    doc["lemma_committee_competence"] = c.lemma_committee_competence;
    doc["lemma_candidates"] = c.lemma_candidates;
    doc["lemma_candidate_best"] = c.lemma_candidate_best;
    doc["lemma_gap_low"] = c.lemma_gap_low;
    doc["lemma_gap_high"] = c.lemma_gap_high;
    return doc.dump(2);
}

}  // namespace bee
