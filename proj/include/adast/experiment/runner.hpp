#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include "adast/experiment/parallel.hpp"
#include "adast/experiment/trainer.hpp"
#include "adast/model/baselines.hpp"

namespace adast::experiment {

/// First-horizon-day truth and prediction for each window, in window order.
struct DaySeries {
    std::vector<std::string> dates;
    std::vector<double> truth;
    std::vector<double> prediction;
};

struct TrialResult {
    std::size_t fold = 0;
    int test_subject = 0;
    int val_subject = 0;
    bool skipped = false;
    std::string skip_reason;
    std::size_t n_train = 0, n_val = 0, n_test = 0;
    TrainHistory history;
    double test_rmse = 0.0;
    std::optional<double> val_rmse;
    double subject_mean_rmse = 0.0;  // predicting the test subject's own mean target
    model::HyperParams hyperparams;
    double wall_seconds = 0.0;
    DaySeries test_series;
    DaySeries val_series;
};

/// Everything one LOSO run needs besides the data.
struct RunSpec {
    windowing::WindowConfig window;
    model::ModelKind kind = model::ModelKind::adast;
    model::HyperParams hyperparams;
    TrainConfig train;  // alpha and batch_size are taken from hyperparams
    model::ModelOptions options;
    std::uint64_t seed = 0;
};

inline DaySeries day_series(const std::vector<windowing::WindowedInstance>& instances, const Tensor& pred) {
    DaySeries s;
    const std::size_t h = pred.dim(1);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        s.dates.push_back(data::format_date(instances[i].first_target));
        s.truth.push_back(instances[i].y[0]);
        s.prediction.push_back(pred[i * h]);
    }
    return s;
}

/// Optional hook receiving each fold's trained model (e.g. to write a checkpoint).
using FoldModelSink = std::function<void(const TrialResult&, model::Model&)>;

inline TrialResult run_fold(const PreparedData& prepared, const FoldSpec& fold, const RunSpec& spec,
                            std::ostream* log = nullptr, const FoldModelSink& sink = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialResult r;
    r.fold = fold.index;
    r.test_subject = fold.test_subject;
    r.val_subject = fold.val_subject;
    r.hyperparams = spec.hyperparams;

    const FoldData fd = build_fold_data(prepared, fold, spec.window);
    verify_lineage(fd);
    r.n_train = fd.train.size();
    r.n_val = fd.val.size();
    r.n_test = fd.test.size();
    if (fd.train.empty() || fd.test.empty()) {
        r.skipped = true;
        r.skip_reason = fd.train.empty() ? "no training windows" : "no test windows";
        return r;
    }

    Rng fold_rng = Rng(spec.seed).fork(fold.index);
    const DomainMap domains(prepared.subject_ids());
    const model::ModelDims dims{prepared.feature_names.size(), spec.window.input_window, spec.window.horizon,
                                domains.size()};
    auto net = model::build_model(spec.kind, spec.hyperparams, dims, fold_rng, spec.options);

    TrainConfig tc = spec.train;
    tc.alpha = spec.hyperparams.alpha;
    tc.batch_size = static_cast<std::size_t>(spec.hyperparams.batch_size);
    tc.seed = fold_rng.next_u64();
    r.history = train(*net, fd.train, fd.val, tc, domains, log);

    const Tensor test_pred = predict(*net, fd.test);
    const Tensor test_true = stack_targets(fd.test);
    r.test_rmse = rmse(test_pred.data(), test_true.data());
    const double mean_target = test_true.sum() / static_cast<double>(test_true.size());
    const std::vector<double> mean_pred(test_true.size(), mean_target);
    r.subject_mean_rmse = rmse(mean_pred, test_true.data());
    r.test_series = day_series(fd.test, test_pred);
    if (!fd.val.empty()) {
        const Tensor val_pred = predict(*net, fd.val);
        r.val_rmse = rmse(val_pred.data(), stack_targets(fd.val).data());
        r.val_series = day_series(fd.val, val_pred);
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (sink) sink(r, *net);
    return r;
}

/// Aggregate over the folds of one (W, H) configuration.
struct CellResult {
    std::size_t input_window = 0;
    std::size_t horizon = 0;
    std::string model;
    bool empty = false;
    std::string empty_reason;
    double mean_test_rmse = 0.0;
    std::optional<double> mean_val_rmse;
    std::vector<TrialResult> folds;

    /// Test RMSE per test subject, for folds that produced one.
    std::map<int, double> per_subject() const {
        std::map<int, double> out;
        for (const auto& f : folds)
            if (!f.skipped) out[f.test_subject] = f.test_rmse;
        return out;
    }
};

inline void summarize(CellResult& cell) {
    double sum = 0.0, val_sum = 0.0;
    std::size_t n = 0, nv = 0;
    for (const auto& f : cell.folds) {
        if (f.skipped) continue;
        sum += f.test_rmse;
        ++n;
        if (f.val_rmse) {
            val_sum += *f.val_rmse;
            ++nv;
        }
    }
    cell.empty = n == 0;
    if (cell.empty) {
        cell.empty_reason = "window and horizon exceed every subject's series";
        cell.mean_test_rmse = 0.0;
        cell.mean_val_rmse.reset();
        return;
    }
    cell.mean_test_rmse = sum / static_cast<double>(n);
    if (nv) cell.mean_val_rmse = val_sum / static_cast<double>(nv);
}

/// Full LOSO evaluation of one configuration; folds run on up to `jobs` threads.
inline CellResult run_loso(const PreparedData& prepared, const RunSpec& spec, std::size_t jobs = 1,
                           std::ostream* log = nullptr, const FoldModelSink& sink = {}) {
    const auto folds = loso_folds(prepared.subject_ids());
    CellResult cell;
    cell.input_window = spec.window.input_window;
    cell.horizon = spec.window.horizon;
    cell.model = model::to_string(spec.kind);
    cell.folds.resize(folds.size());
    std::mutex log_mutex;
    parallel_for(folds.size(), jobs, [&](std::size_t i) {
        std::ostringstream fold_log;
        cell.folds[i] = run_fold(prepared, folds[i], spec, log ? &fold_log : nullptr, sink);
        if (log) {
            std::lock_guard lock(log_mutex);
            *log << "[" << cell.model << " W=" << cell.input_window << " H=" << cell.horizon << " fold "
                 << folds[i].index << " test=" << folds[i].test_subject << " val=" << folds[i].val_subject << "]\n"
                 << fold_log.str();
            if (!cell.folds[i].skipped) *log << "  test_rmse=" << cell.folds[i].test_rmse << '\n';
        }
    });
    summarize(cell);
    return cell;
}

}  // namespace adast::experiment
