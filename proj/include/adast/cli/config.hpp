#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adast/data/synthetic.hpp"
#include "adast/experiment/grid.hpp"
#include "adast/model/hyperparams.hpp"

namespace adast::cli {

/// Every knob a command reads. Mirrors the JSON config file one-to-one.
struct RunConfig {
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::string out = "out";
    std::string input;

    data::SyntheticConfig generate;
    std::string generate_output;  // default: <out>/synthetic.csv

    std::string model = "adast";
    windowing::WindowConfig window;
    model::HyperParams hyperparams;
    std::size_t epochs = 50;
    std::size_t patience = 10;
    double lr = 1e-3;
    double weight_decay = 1e-5;
    bool gradient_reversal = false;
    std::vector<std::string> drop_features{"hydration"};
    std::size_t search_trials = 0;

    std::vector<std::size_t> grid_windows = experiment::default_input_windows();
    std::vector<std::size_t> grid_horizons = experiment::default_horizons();
    std::vector<std::string> grid_models{"adast"};
};

namespace detail {
template <typename F>
void for_each_key(const nlohmann::json& j, const std::string& section, F&& f) {
    if (!j.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : j.items()) f(key, value);
}

[[noreturn]] inline void unknown(const std::string& section, const std::string& key) {
    throw ConfigError("unknown config key '" + (section.empty() ? key : section + "." + key) + "'");
}
}  // namespace detail

/// Execution settings (seed excluded) are left out so that results do not depend on where or how wide a run executes.
inline nlohmann::json to_json(const RunConfig& c, bool include_execution = true) {
    nlohmann::json j = {
        {"seed", c.seed},
        {"input", c.input},
        {"generate",
         {{"subjects", c.generate.n_subjects},
          {"days", c.generate.n_days},
          {"shift_strength", c.generate.shift_strength},
          {"anomaly_rate", c.generate.anomaly_rate},
          {"missing_rate", c.generate.missing_rate},
          {"output", c.generate_output}}},
        {"model", c.model},
        {"window", {{"input_window", c.window.input_window}, {"horizon", c.window.horizon}, {"stride", c.window.stride}}},
        {"hyperparams", c.hyperparams},
        {"train",
         {{"epochs", c.epochs}, {"patience", c.patience}, {"lr", c.lr}, {"weight_decay", c.weight_decay}}},
        {"gradient_reversal", c.gradient_reversal},
        {"drop_features", c.drop_features},
        {"search_trials", c.search_trials},
        {"grid", {{"input_windows", c.grid_windows}, {"horizons", c.grid_horizons}, {"models", c.grid_models}}},
    };
    if (include_execution) {
        j["jobs"] = c.jobs;
        j["out"] = c.out;
    }
    return j;
}

/// Overlays the keys present in `j` onto `c`. Unknown keys are errors.
inline void apply_json(const nlohmann::json& j, RunConfig& c) {
    try {
        detail::for_each_key(j, "", [&](const std::string& key, const nlohmann::json& v) {
            if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "jobs") c.jobs = v.get<std::size_t>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "input") c.input = v.get<std::string>();
            else if (key == "model") c.model = v.get<std::string>();
            else if (key == "gradient_reversal") c.gradient_reversal = v.get<bool>();
            else if (key == "drop_features") c.drop_features = v.get<std::vector<std::string>>();
            else if (key == "search_trials") c.search_trials = v.get<std::size_t>();
            else if (key == "hyperparams") model::from_json(v, c.hyperparams);
            else if (key == "generate")
                detail::for_each_key(v, key, [&](const std::string& k, const nlohmann::json& x) {
                    if (k == "subjects") c.generate.n_subjects = x.get<std::size_t>();
                    else if (k == "days") c.generate.n_days = x.get<std::size_t>();
                    else if (k == "shift_strength") c.generate.shift_strength = x.get<double>();
                    else if (k == "anomaly_rate") c.generate.anomaly_rate = x.get<double>();
                    else if (k == "missing_rate") c.generate.missing_rate = x.get<double>();
                    else if (k == "output") c.generate_output = x.get<std::string>();
                    else detail::unknown(key, k);
                });
            else if (key == "window")
                detail::for_each_key(v, key, [&](const std::string& k, const nlohmann::json& x) {
                    if (k == "input_window") c.window.input_window = x.get<std::size_t>();
                    else if (k == "horizon") c.window.horizon = x.get<std::size_t>();
                    else if (k == "stride") c.window.stride = x.get<std::size_t>();
                    else detail::unknown(key, k);
                });
            else if (key == "train")
                detail::for_each_key(v, key, [&](const std::string& k, const nlohmann::json& x) {
                    if (k == "epochs") c.epochs = x.get<std::size_t>();
                    else if (k == "patience") c.patience = x.get<std::size_t>();
                    else if (k == "lr") c.lr = x.get<double>();
                    else if (k == "weight_decay") c.weight_decay = x.get<double>();
                    else detail::unknown(key, k);
                });
            else if (key == "grid")
                detail::for_each_key(v, key, [&](const std::string& k, const nlohmann::json& x) {
                    if (k == "input_windows") c.grid_windows = x.get<std::vector<std::size_t>>();
                    else if (k == "horizons") c.grid_horizons = x.get<std::vector<std::size_t>>();
                    else if (k == "models") c.grid_models = x.get<std::vector<std::string>>();
                    else detail::unknown(key, k);
                });
            else detail::unknown("", key);
        });
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid config value: ") + e.what());
    }
}

inline void load_config_file(const std::string& path, RunConfig& c) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    apply_json(j, c);
}

}  // namespace adast::cli
