#pragma once

#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "adast/experiment/grid.hpp"
#include "adast/experiment/search.hpp"

namespace adast::experiment {

inline constexpr const char* kResultsFormat = "adast-results";
inline constexpr int kResultsVersion = 1;

namespace detail {
inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
inline double number_from(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}
inline nlohmann::json numbers(const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(number_or_null(x));
    return a;
}
inline std::vector<double> numbers_from(const nlohmann::json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(number_from(x));
    return v;
}
}  // namespace detail

inline void to_json(nlohmann::json& j, const DaySeries& s) {
    j = {{"dates", s.dates}, {"truth", detail::numbers(s.truth)}, {"prediction", detail::numbers(s.prediction)}};
}

inline void from_json(const nlohmann::json& j, DaySeries& s) {
    s.dates = j.at("dates").get<std::vector<std::string>>();
    s.truth = detail::numbers_from(j.at("truth"));
    s.prediction = detail::numbers_from(j.at("prediction"));
}

/// Wall time is deliberately left out so identical runs serialize identically.
inline void to_json(nlohmann::json& j, const TrialResult& r) {
    j = {{"fold", r.fold},
         {"test_subject", r.test_subject},
         {"val_subject", r.val_subject},
         {"skipped", r.skipped},
         {"skip_reason", r.skip_reason},
         {"n_train", r.n_train},
         {"n_val", r.n_val},
         {"n_test", r.n_test},
         {"hyperparams", r.hyperparams}};
    if (r.skipped) return;
    j["test_rmse"] = r.test_rmse;
    j["val_rmse"] = r.val_rmse ? nlohmann::json(*r.val_rmse) : nlohmann::json(nullptr);
    j["subject_mean_rmse"] = r.subject_mean_rmse;
    j["history"] = {{"initial_train_main", r.history.initial_train_main},
                    {"train_main", detail::numbers(r.history.train_main)},
                    {"train_domain", detail::numbers(r.history.train_domain)},
                    {"val_main", detail::numbers(r.history.val_main)},
                    {"val_domain", detail::numbers(r.history.val_domain)},
                    {"best_epoch", r.history.best_epoch},
                    {"stopped_early", r.history.stopped_early}};
    j["test_series"] = r.test_series;
    j["val_series"] = r.val_series;
}

inline void from_json(const nlohmann::json& j, TrialResult& r) {
    r.fold = j.at("fold").get<std::size_t>();
    r.test_subject = j.at("test_subject").get<int>();
    r.val_subject = j.at("val_subject").get<int>();
    r.skipped = j.at("skipped").get<bool>();
    r.skip_reason = j.at("skip_reason").get<std::string>();
    r.n_train = j.at("n_train").get<std::size_t>();
    r.n_val = j.at("n_val").get<std::size_t>();
    r.n_test = j.at("n_test").get<std::size_t>();
    model::from_json(j.at("hyperparams"), r.hyperparams);
    if (r.skipped) return;
    r.test_rmse = j.at("test_rmse").get<double>();
    if (!j.at("val_rmse").is_null()) r.val_rmse = j.at("val_rmse").get<double>();
    r.subject_mean_rmse = j.at("subject_mean_rmse").get<double>();
    const auto& h = j.at("history");
    r.history.initial_train_main = h.at("initial_train_main").get<double>();
    r.history.train_main = detail::numbers_from(h.at("train_main"));
    r.history.train_domain = detail::numbers_from(h.at("train_domain"));
    r.history.val_main = detail::numbers_from(h.at("val_main"));
    r.history.val_domain = detail::numbers_from(h.at("val_domain"));
    r.history.best_epoch = h.at("best_epoch").get<std::size_t>();
    r.history.stopped_early = h.at("stopped_early").get<bool>();
    r.test_series = j.at("test_series").get<DaySeries>();
    r.val_series = j.at("val_series").get<DaySeries>();
}

inline void to_json(nlohmann::json& j, const CellResult& c) {
    nlohmann::json per_subject = nlohmann::json::object();
    for (const auto& [id, v] : c.per_subject()) per_subject[std::to_string(id)] = v;
    j = {{"input_window", c.input_window},
         {"horizon", c.horizon},
         {"model", c.model},
         {"empty", c.empty},
         {"empty_reason", c.empty_reason},
         {"mean_test_rmse", c.empty ? nlohmann::json(nullptr) : nlohmann::json(c.mean_test_rmse)},
         {"mean_val_rmse", c.mean_val_rmse ? nlohmann::json(*c.mean_val_rmse) : nlohmann::json(nullptr)},
         {"per_subject_test_rmse", per_subject},
         {"folds", c.folds}};
}

inline void from_json(const nlohmann::json& j, CellResult& c) {
    c.input_window = j.at("input_window").get<std::size_t>();
    c.horizon = j.at("horizon").get<std::size_t>();
    c.model = j.at("model").get<std::string>();
    c.empty = j.at("empty").get<bool>();
    c.empty_reason = j.at("empty_reason").get<std::string>();
    c.mean_test_rmse = c.empty ? 0.0 : j.at("mean_test_rmse").get<double>();
    if (!j.at("mean_val_rmse").is_null()) c.mean_val_rmse = j.at("mean_val_rmse").get<double>();
    c.folds = j.at("folds").get<std::vector<TrialResult>>();
}

inline void to_json(nlohmann::json& j, const GridResult& g) { j = {{"model", g.model}, {"cells", g.cells}}; }

inline void from_json(const nlohmann::json& j, GridResult& g) {
    g.model = j.at("model").get<std::string>();
    g.cells = j.at("cells").get<std::vector<CellResult>>();
}

inline void to_json(nlohmann::json& j, const SearchTrial& t) {
    j = {{"index", t.index},
         {"hyperparams", t.hyperparams},
         {"fold_scores", detail::numbers(t.fold_scores)},
         {"mean_score", detail::number_or_null(t.mean_score)},
         {"failed", t.failed},
         {"error", t.error}};
}

inline void to_json(nlohmann::json& j, const SearchResult& s) {
    j = {{"best", s.best}, {"best_index", s.best_index}, {"trials", s.trials}};
}

/// In-memory form of a results file.
struct ResultsFile {
    std::string command;
    std::uint64_t seed = 0;
    nlohmann::json config;
    std::vector<GridResult> models;
    nlohmann::json search;  // null unless a search ran
};

inline nlohmann::json results_json(const ResultsFile& r) {
    return {{"format", kResultsFormat}, {"version", kResultsVersion}, {"command", r.command}, {"seed", r.seed},
            {"config", r.config},       {"models", r.models},         {"search", r.search}};
}

inline ResultsFile results_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kResultsFormat) throw ParseError("not an adast results file");
        if (j.at("version").get<int>() != kResultsVersion) throw ParseError("unsupported results version");
        ResultsFile r;
        r.command = j.at("command").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.config = j.at("config");
        r.models = j.at("models").get<std::vector<GridResult>>();
        r.search = j.at("search");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("corrupt results file: ") + e.what());
    }
}

inline void write_results(const std::string& path, const ResultsFile& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write results '" + path + "'");
    out << results_json(r).dump(2) << '\n';
}

inline ResultsFile read_results(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open results file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("results file '" + path + "' is not valid JSON: " + e.what());
    }
    return results_from_json(j);
}

/// model,input_window,horizon,mean_test_rmse,mean_val_rmse,folds,empty
inline std::string grid_csv(const std::vector<GridResult>& models) {
    std::ostringstream out;
    out.precision(17);
    out << "model,input_window,horizon,mean_test_rmse,mean_val_rmse,folds,empty\n";
    for (const auto& g : models)
        for (const auto& c : g.cells) {
            std::size_t n = 0;
            for (const auto& f : c.folds) n += !f.skipped;
            out << g.model << ',' << c.input_window << ',' << c.horizon << ',';
            if (!c.empty) out << c.mean_test_rmse;
            out << ',';
            if (c.mean_val_rmse) out << *c.mean_val_rmse;
            out << ',' << n << ',' << (c.empty ? 1 : 0) << '\n';
        }
    return out.str();
}

/// Wall-clock seconds per fold, kept apart from the deterministic results file.
inline nlohmann::json timing_json(const std::vector<GridResult>& models) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& g : models)
        for (const auto& c : g.cells)
            for (const auto& f : c.folds)
                out.push_back({{"model", g.model},
                               {"input_window", c.input_window},
                               {"horizon", c.horizon},
                               {"fold", f.fold},
                               {"wall_seconds", f.wall_seconds}});
    return out;
}

}  // namespace adast::experiment
