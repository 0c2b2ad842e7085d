#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csoc/game.hpp"
#include "csoc/rl.hpp"

namespace csoc {

// Training knobs recipes expose through config files.
struct TrainSettings {
    long long defender_episodes = 600000;
    long long attacker_episodes = 30000;
    int defender_candidates = 3;  // tables trained per (re)training, best kept
    int br_candidates = 8;        // best-response trainings, strongest kept
    int harden_iterations = 4;    // cap on the robustification loop
    double target_validation_sup = 0.35;
    double improvement_threshold = 0.10;
    int double_oracle_iterations = 3;
    std::string defender_policy_file; // load instead of training when set
    std::string attacker_policy_file;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

inline long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
    }
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": '" + value + "'");
}

// "1.0:0.95;0.975:0.05" -> factor pmf
inline std::vector<std::pair<double, double>> parse_pmf(const std::string& key,
                                                        const std::string& value) {
    std::vector<std::pair<double, double>> pmf;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("config: bad pmf entry for " + key + ": '" + item +
                                        "'");
        pmf.emplace_back(parse_double(key, trim(item.substr(0, colon))),
                         parse_double(key, trim(item.substr(colon + 1))));
    }
    if (pmf.empty()) throw std::invalid_argument("config: empty pmf for " + key);
    return pmf;
}

} // namespace detail

// Flat key = value lines; '#' comments; unknown keys are errors so typos
// cannot silently change an experiment.
inline std::vector<std::pair<std::string, std::string>> parse_config_lines(
    std::istream& in) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is not 'key = value': '" + trimmed + "'");
        const std::string key = detail::trim(trimmed.substr(0, eq));
        const std::string value = detail::trim(trimmed.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " has an empty key or value");
        entries.emplace_back(key, value);
    }
    return entries;
}

inline void apply_config_entry(GameConfig& cfg, TrainSettings& train, const std::string& key,
                               const std::string& value) {
    using namespace detail;
    if (key == "lambda_alerts_per_hour") cfg.queue.lambda_nominal = parse_double(key, value);
    else if (key == "mu_alerts_per_hour") cfg.queue.mu_nominal = parse_double(key, value);
    else if (key == "mu_mode") {
        if (value == "fixed") cfg.queue.disturbance.mode = DisturbanceModel::Mode::Fixed;
        else if (value == "hourly_multiplicative")
            cfg.queue.disturbance.mode = DisturbanceModel::Mode::HourlyMultiplicative;
        else throw std::invalid_argument("config: unknown mu_mode '" + value + "'");
    } else if (key == "mu_factor_pmf") cfg.queue.disturbance.factor_pmf = parse_pmf(key, value);
    else if (key == "horizon_hours") cfg.horizon_hours = static_cast<int>(parse_int(key, value));
    else if (key == "defender_budget_inspections") cfg.defender_budget = parse_int(key, value);
    else if (key == "attacker_budget_alerts") cfg.attacker_budget = parse_int(key, value);
    else if (key == "per_hour_cap_inspections") cfg.per_hour_cap = parse_int(key, value);
    else if (key == "defender_chunk_inspections") cfg.defender_chunk = parse_int(key, value);
    else if (key == "attacker_chunk_alerts") cfg.attacker_chunk = parse_int(key, value);
    else if (key == "cost_anchor_low_alerts") cfg.cost_anchor_low = parse_int(key, value);
    else if (key == "cost_anchor_high_alerts") cfg.cost_anchor_high = parse_int(key, value);
    else if (key == "shaping_weight") cfg.shaping_weight = parse_double(key, value);
    else if (key == "initial_backlog_alerts") cfg.initial_backlog = parse_int(key, value);
    else if (key == "attacker_hour_capped") cfg.attacker_hour_capped = parse_bool(key, value);
    else if (key == "train_episodes_defender") train.defender_episodes = parse_int(key, value);
    else if (key == "train_episodes_attacker") train.attacker_episodes = parse_int(key, value);
    else if (key == "defender_candidates")
        train.defender_candidates = static_cast<int>(parse_int(key, value));
    else if (key == "best_response_candidates")
        train.br_candidates = static_cast<int>(parse_int(key, value));
    else if (key == "harden_iterations")
        train.harden_iterations = static_cast<int>(parse_int(key, value));
    else if (key == "target_validation_sup")
        train.target_validation_sup = parse_double(key, value);
    else if (key == "improvement_threshold")
        train.improvement_threshold = parse_double(key, value);
    else if (key == "double_oracle_iterations")
        train.double_oracle_iterations = static_cast<int>(parse_int(key, value));
    else if (key == "defender_policy_file") train.defender_policy_file = value;
    else if (key == "attacker_policy_file") train.attacker_policy_file = value;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline void apply_config_file(GameConfig& cfg, TrainSettings& train, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    for (const auto& [key, value] : parse_config_lines(in))
        apply_config_entry(cfg, train, key, value);
}

// Canonical rendering of a config in the same flat format.
inline std::string render_config(const GameConfig& cfg, const TrainSettings& train) {
    std::ostringstream out;
    out.precision(17);
    out << "lambda_alerts_per_hour = " << cfg.queue.lambda_nominal << '\n';
    out << "mu_alerts_per_hour = " << cfg.queue.mu_nominal << '\n';
    out << "mu_mode = "
        << (cfg.queue.disturbance.mode == DisturbanceModel::Mode::Fixed
                ? "fixed"
                : "hourly_multiplicative")
        << '\n';
    out << "mu_factor_pmf = ";
    for (std::size_t i = 0; i < cfg.queue.disturbance.factor_pmf.size(); ++i) {
        if (i) out << ';';
        out << cfg.queue.disturbance.factor_pmf[i].first << ':'
            << cfg.queue.disturbance.factor_pmf[i].second;
    }
    out << '\n';
    out << "horizon_hours = " << cfg.horizon_hours << '\n';
    out << "defender_budget_inspections = " << cfg.defender_budget << '\n';
    out << "attacker_budget_alerts = " << cfg.attacker_budget << '\n';
    out << "per_hour_cap_inspections = " << cfg.per_hour_cap << '\n';
    out << "defender_chunk_inspections = " << cfg.defender_chunk << '\n';
    out << "attacker_chunk_alerts = " << cfg.attacker_chunk << '\n';
    out << "cost_anchor_low_alerts = " << cfg.cost_anchor_low << '\n';
    out << "cost_anchor_high_alerts = " << cfg.cost_anchor_high << '\n';
    out << "shaping_weight = " << cfg.shaping_weight << '\n';
    out << "initial_backlog_alerts = " << cfg.initial_backlog << '\n';
    out << "attacker_hour_capped = " << (cfg.attacker_hour_capped ? "true" : "false") << '\n';
    out << "train_episodes_defender = " << train.defender_episodes << '\n';
    out << "train_episodes_attacker = " << train.attacker_episodes << '\n';
    out << "defender_candidates = " << train.defender_candidates << '\n';
    out << "best_response_candidates = " << train.br_candidates << '\n';
    out << "harden_iterations = " << train.harden_iterations << '\n';
    out << "target_validation_sup = " << train.target_validation_sup << '\n';
    out << "improvement_threshold = " << train.improvement_threshold << '\n';
    out << "double_oracle_iterations = " << train.double_oracle_iterations << '\n';
    if (!train.defender_policy_file.empty())
        out << "defender_policy_file = " << train.defender_policy_file << '\n';
    if (!train.attacker_policy_file.empty())
        out << "attacker_policy_file = " << train.attacker_policy_file << '\n';
    return out.str();
}

} // namespace csoc
