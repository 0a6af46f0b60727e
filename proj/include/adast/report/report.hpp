#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "adast/experiment/results.hpp"
#include "adast/report/svg.hpp"

namespace adast::report {

/// Published figures for the original wearable cohort, which is not public.
/// They are printed for orientation only and are not expected on synthetic data.
struct ReferenceValues {
    static constexpr double best_rmse = 0.282;  // W=7, H=1
    static constexpr std::size_t best_window = 7;
    static constexpr std::size_t best_horizon = 1;
    static constexpr double baseline_rmse_low = 0.3047;
    static constexpr double baseline_rmse_high = 0.4244;
    static constexpr double nine_day_rmse = 0.303;
};

struct BestCell {
    const experiment::GridResult* grid = nullptr;
    const experiment::CellResult* cell = nullptr;
};

inline BestCell best_cell(const std::vector<experiment::GridResult>& models) {
    BestCell best;
    for (const auto& g : models)
        for (const auto& c : g.cells)
            if (!c.empty && (!best.cell || c.mean_test_rmse < best.cell->mean_test_rmse)) best = {&g, &c};
    return best;
}

/// RMSE vs horizon, one row per (W, H) cell.
inline std::string lineplot_csv(const experiment::GridResult& grid) {
    std::ostringstream out;
    out.precision(17);
    out << "model,input_window,horizon,mean_test_rmse\n";
    for (const auto& c : grid.cells) {
        out << grid.model << ',' << c.input_window << ',' << c.horizon << ',';
        if (!c.empty) out << c.mean_test_rmse;
        out << '\n';
    }
    return out.str();
}

inline std::string lineplot_svg(const experiment::GridResult& grid) {
    std::map<std::size_t, Series> by_window;
    for (const auto& c : grid.cells) {
        auto& s = by_window[c.input_window];
        s.label = "W=" + std::to_string(c.input_window);
        s.x.push_back(static_cast<double>(c.horizon));
        s.y.push_back(c.empty ? std::numeric_limits<double>::quiet_NaN() : c.mean_test_rmse);
    }
    std::vector<Series> series;
    for (auto& [w, s] : by_window) series.push_back(std::move(s));
    return line_chart("Mean LOSO test RMSE (" + grid.model + ")", "predicting window H (days)", "RMSE", series);
}

/// The (W, H) cell used for per-subject comparisons: the reference cell if present, else the first non-empty one.
inline std::pair<std::size_t, std::size_t> radar_cell(const std::vector<experiment::GridResult>& models) {
    for (const auto& g : models)
        if (const auto* c = g.find(ReferenceValues::best_window, ReferenceValues::best_horizon); c && !c->empty)
            return {c->input_window, c->horizon};
    for (const auto& g : models)
        for (const auto& c : g.cells)
            if (!c.empty) return {c.input_window, c.horizon};
    return {0, 0};
}

/// subject,<model...> test RMSE at one (W, H) cell.
inline std::string radar_csv(const std::vector<experiment::GridResult>& models, std::size_t w, std::size_t h) {
    std::set<int> subjects;
    for (const auto& g : models)
        if (const auto* c = g.find(w, h))
            for (const auto& [id, v] : c->per_subject()) subjects.insert(id);
    std::ostringstream out;
    out.precision(17);
    out << "subject";
    for (const auto& g : models) out << ',' << g.model;
    out << '\n';
    for (int id : subjects) {
        out << id;
        for (const auto& g : models) {
            out << ',';
            if (const auto* c = g.find(w, h)) {
                const auto ps = c->per_subject();
                if (auto it = ps.find(id); it != ps.end()) out << it->second;
            }
        }
        out << '\n';
    }
    return out.str();
}

inline std::string radar_svg(const std::vector<experiment::GridResult>& models, std::size_t w, std::size_t h) {
    std::set<int> subjects;
    for (const auto& g : models)
        if (const auto* c = g.find(w, h))
            for (const auto& [id, v] : c->per_subject()) subjects.insert(id);
    std::vector<std::string> axes;
    for (int id : subjects) axes.push_back("S-" + std::to_string(id));
    std::vector<Series> series;
    for (const auto& g : models) {
        Series s;
        s.label = g.model;
        const auto* c = g.find(w, h);
        const auto ps = c ? c->per_subject() : std::map<int, double>{};
        for (int id : subjects) {
            auto it = ps.find(id);
            s.y.push_back(it == ps.end() ? std::numeric_limits<double>::quiet_NaN() : it->second);
        }
        series.push_back(std::move(s));
    }
    return radar_chart("Per-subject test RMSE (W=" + std::to_string(w) + ", H=" + std::to_string(h) + ")", axes,
                       series);
}

/// date,split,true_score,predicted_score for one fold, in sleep-score units.
inline std::string series_csv(const experiment::TrialResult& fold, double score_scale = 100.0) {
    std::ostringstream out;
    out.precision(10);
    out << "date,split,subject,true_score,predicted_score\n";
    auto emit = [&](const experiment::DaySeries& s, const char* split, int subject) {
        for (std::size_t i = 0; i < s.dates.size(); ++i)
            out << s.dates[i] << ',' << split << ',' << subject << ',' << s.truth[i] * score_scale << ','
                << s.prediction[i] * score_scale << '\n';
    };
    emit(fold.val_series, "validation", fold.val_subject);
    emit(fold.test_series, "test", fold.test_subject);
    return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

/// Prints the summary and writes one series file per test subject of the best cell.
/// Returns the number of series files written.
inline std::size_t write_report(const std::vector<experiment::ResultsFile>& files, std::ostream& out,
                                const std::filesystem::path& out_dir) {
    std::vector<experiment::GridResult> models;
    for (const auto& f : files) models.insert(models.end(), f.models.begin(), f.models.end());

    out << std::fixed << std::setprecision(4);
    out << "== adast report ==\n"
        << "reference (original cohort, not reproducible here): best RMSE " << ReferenceValues::best_rmse << " at W="
        << ReferenceValues::best_window << "/H=" << ReferenceValues::best_horizon << "; baselines "
        << ReferenceValues::baseline_rmse_low << "-" << ReferenceValues::baseline_rmse_high << "; H=9 "
        << ReferenceValues::nine_day_rmse << "\n";
    for (const auto& f : files) out << "results: command=" << f.command << " seed=" << f.seed << '\n';

    for (const auto& g : models) {
        out << "\nmodel " << g.model << "\n  W  H  mean_test_rmse  mean_val_rmse\n";
        for (const auto& c : g.cells) {
            out << "  " << std::setw(2) << c.input_window << ' ' << std::setw(2) << c.horizon << "  ";
            if (c.empty)
                out << "(empty: " << c.empty_reason << ")\n";
            else
                out << std::setw(14) << c.mean_test_rmse << "  "
                    << (c.mean_val_rmse ? std::to_string(*c.mean_val_rmse) : std::string("-")) << '\n';
        }
    }

    const BestCell best = best_cell(models);
    if (!best.cell) {
        out << "\nno non-empty cells\n";
        return 0;
    }
    out << "\nbest cell: model=" << best.grid->model << " W=" << best.cell->input_window
        << " H=" << best.cell->horizon << " mean_test_rmse=" << best.cell->mean_test_rmse << '\n';
    out << "\nper-subject (best cell)\n  subject  test_rmse  val_rmse  subject_mean_rmse\n";
    std::filesystem::create_directories(out_dir);
    std::size_t written = 0;
    for (const auto& f : best.cell->folds) {
        if (f.skipped) {
            out << "  " << std::setw(7) << f.test_subject << "  (skipped: " << f.skip_reason << ")\n";
            continue;
        }
        out << "  " << std::setw(7) << f.test_subject << "  " << std::setw(9) << f.test_rmse << "  " << std::setw(8)
            << (f.val_rmse ? *f.val_rmse : std::numeric_limits<double>::quiet_NaN()) << "  " << std::setw(17)
            << f.subject_mean_rmse << '\n';
        write_text(out_dir / ("series_subject_" + std::to_string(f.test_subject) + ".csv"), series_csv(f));
        ++written;
    }
    return written;
}

}  // namespace adast::report
