#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "adast/cli/config.hpp"
#include "adast/experiment/results.hpp"
#include "adast/model/checkpoint.hpp"
#include "adast/report/report.hpp"

namespace adast::cli {

/// Stable process exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitUser = 2 };

namespace fs = std::filesystem;

namespace detail {

inline std::string dump_sorted(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline std::vector<data::SubjectDataset> load_input(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("no input CSV given (use --input or the 'input' config key)");
    if (!fs::exists(cfg.input)) throw ParseError("input file '" + cfg.input + "' does not exist");
    return data::parse_csv(cfg.input);
}

inline experiment::RunSpec run_spec(const RunConfig& cfg, model::ModelKind kind) {
    model::validate(cfg.hyperparams, true);
    experiment::RunSpec spec;
    spec.window = cfg.window;
    spec.kind = kind;
    spec.hyperparams = cfg.hyperparams;
    spec.train.epochs = cfg.epochs;
    spec.train.patience = cfg.patience;
    spec.train.lr = cfg.lr;
    spec.train.weight_decay = cfg.weight_decay;
    spec.options.gradient_reversal = cfg.gradient_reversal;
    spec.seed = cfg.seed;
    return spec;
}

}  // namespace detail

inline int cmd_generate(const RunConfig& cfg, std::ostream& out) {
    const auto datasets = data::generate_synthetic(cfg.generate, cfg.seed);
    const fs::path path = cfg.generate_output.empty() ? fs::path(cfg.out) / "synthetic.csv" : fs::path(cfg.generate_output);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    data::write_csv(path.string(), datasets);
    std::ofstream sidecar(path.string() + ".config.json", std::ios::binary);
    sidecar << detail::dump_sorted({{"seed", cfg.seed}, {"config", to_json(cfg, false)}});
    if (!sidecar) throw Error("cannot write config sidecar next to '" + path.string() + "'");
    out << "wrote " << datasets.size() << " subjects x " << cfg.generate.n_days << " days to " << path.string() << '\n';
    return kExitOk;
}

inline int cmd_train(const RunConfig& cfg, std::ostream& out) {
    const experiment::PreparedData prepared = experiment::prepare(detail::load_input(cfg), cfg.drop_features);
    for (const auto& w : prepared.warnings) out << "warning: " << w << '\n';
    const model::ModelKind kind = model::parse_model_kind(cfg.model);
    experiment::RunSpec spec = detail::run_spec(cfg, kind);

    experiment::ResultsFile results;
    results.command = "train";
    results.seed = cfg.seed;
    results.config = to_json(cfg, false);

    if (cfg.search_trials > 0) {
        Rng search_rng = Rng(cfg.seed).fork(0x5EA7C4);
        auto runner = [&](const model::HyperParams& hp, std::size_t trial) {
            experiment::RunSpec trial_spec = spec;
            trial_spec.hyperparams = hp;
            trial_spec.seed = Rng(cfg.seed).fork(trial + 1).next_u64();
            const auto cell = experiment::run_loso(prepared, trial_spec, cfg.jobs);
            std::vector<double> scores;
            for (const auto& f : cell.folds)
                if (!f.skipped && f.val_rmse) scores.push_back(*f.val_rmse);
            out << "trial " << trial << " done\n";
            return scores;
        };
        const auto search = experiment::random_search(model::SearchSpace{}, cfg.search_trials, runner, search_rng);
        spec.hyperparams = search.best;
        results.search = nlohmann::json(search);
        out << "search: best trial " << search.best_index << '\n';
    }

    const fs::path out_dir(cfg.out);
    fs::create_directories(out_dir / "checkpoints");
    const std::vector<int> domain_ids = prepared.subject_ids();
    auto sink = [&](const experiment::TrialResult& r, model::Model& m) {
        model::save_checkpoint((out_dir / "checkpoints" /
                                ("fold_" + std::to_string(r.fold) + "_test_" + std::to_string(r.test_subject) + ".json"))
                                   .string(),
                               m, prepared.feature_names, domain_ids);
    };
    experiment::GridResult grid;
    grid.model = model::to_string(kind);
    grid.cells.push_back(experiment::run_loso(prepared, spec, cfg.jobs, &out, sink));
    results.models.push_back(std::move(grid));

    experiment::write_results((out_dir / "results.json").string(), results);
    report::write_text(out_dir / "grid.csv", experiment::grid_csv(results.models));
    report::write_text(out_dir / "timing.json", experiment::timing_json(results.models).dump(2) + "\n");
    const auto& cell = results.models.front().cells.front();
    if (cell.empty)
        out << "no fold produced test windows\n";
    else
        out << "mean test RMSE " << cell.mean_test_rmse << " over " << cell.per_subject().size() << " folds\n";
    out << "wrote " << (out_dir / "results.json").string() << '\n';
    return kExitOk;
}

inline int cmd_grid(const RunConfig& cfg, std::ostream& out) {
    const experiment::PreparedData prepared = experiment::prepare(detail::load_input(cfg), cfg.drop_features);
    for (const auto& w : prepared.warnings) out << "warning: " << w << '\n';
    experiment::ResultsFile results;
    results.command = "grid";
    results.seed = cfg.seed;
    results.config = to_json(cfg, false);
    const fs::path out_dir(cfg.out);
    fs::create_directories(out_dir);

    for (const auto& name : cfg.grid_models) {
        const model::ModelKind kind = model::parse_model_kind(name);
        std::ostringstream log;
        auto grid = experiment::run_grid(prepared, cfg.grid_windows, cfg.grid_horizons, detail::run_spec(cfg, kind),
                                         cfg.jobs, &log);
        for (const auto& c : grid.cells)
            out << name << " W=" << c.input_window << " H=" << c.horizon << " "
                << (c.empty ? "empty: " + c.empty_reason : "mean_test_rmse=" + std::to_string(c.mean_test_rmse)) << '\n';
        report::write_text(out_dir / ("lineplot_" + name + ".csv"), report::lineplot_csv(grid));
        report::write_text(out_dir / ("lineplot_" + name + ".svg"), report::lineplot_svg(grid));
        results.models.push_back(std::move(grid));
    }
    const auto [rw, rh] = report::radar_cell(results.models);
    report::write_text(out_dir / "radar.csv", report::radar_csv(results.models, rw, rh));
    report::write_text(out_dir / "radar.svg", report::radar_svg(results.models, rw, rh));
    experiment::write_results((out_dir / "results.json").string(), results);
    report::write_text(out_dir / "grid.csv", experiment::grid_csv(results.models));
    report::write_text(out_dir / "timing.json", experiment::timing_json(results.models).dump(2) + "\n");
    out << "wrote " << (out_dir / "results.json").string() << '\n';
    return kExitOk;
}

inline int cmd_report(const RunConfig& cfg, const std::vector<std::string>& files, std::ostream& out) {
    if (files.empty()) throw ConfigError("report needs at least one results file");
    std::vector<experiment::ResultsFile> loaded;
    for (const auto& f : files) {
        try {
            loaded.push_back(experiment::read_results(f));
        } catch (const ParseError& e) {
            throw ParseError(f + ": " + e.what());
        }
    }
    const std::size_t n = report::write_report(loaded, out, fs::path(cfg.out) / "report");
    out << "\nwrote " << n << " true-vs-predicted series to " << (fs::path(cfg.out) / "report").string() << '\n';
    return kExitOk;
}

/// Parses arguments, runs one command, and maps failures to exit codes:
/// 0 success, 1 internal error (including training divergence), 2 user or input error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"adast: sleep-score forecasting with a conv + LSTM model and a domain-classifier loss"};
    app.require_subcommand(1);
    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::string out_dir;
    auto* o_config = app.add_option("--config", config_path, "JSON config file (see docs/config.md)");
    auto* o_seed = app.add_option("--seed", seed, "master seed");
    auto* o_jobs = app.add_option("--jobs", jobs, "parallel folds (default 1)");
    auto* o_out = app.add_option("--out", out_dir, "output directory");

    // Overrides; only options given on the command line replace config values.
    std::optional<std::size_t> subjects, days, epochs, patience, window, horizon, search_trials;
    std::optional<double> shift, anomaly, missing, alpha, dropout_cnn, dropout_lstm;
    std::optional<int> conv_layers, lstm_layers, cnn_hidden, lstm_hidden, batch_size;
    std::optional<std::string> output, input, model_name;
    std::optional<std::vector<std::size_t>> windows, horizons;
    std::optional<std::vector<std::string>> models, drop_features;
    bool batchnorm = false, no_batchnorm = false, reversal = false;
    std::vector<std::string> report_files;

    auto* gen = app.add_subcommand("generate", "write a seeded synthetic dataset as CSV");
    gen->fallthrough();
    gen->add_option("--subjects", subjects, "number of subjects");
    gen->add_option("--days", days, "days per subject (>= 20)");
    gen->add_option("--shift", shift, "between-subject shift strength in [0, 1]");
    gen->add_option("--anomaly-rate", anomaly, "probability of a sudden score drop");
    gen->add_option("--missing-rate", missing, "probability of a missing or -1 cell");
    gen->add_option("--output", output, "CSV path (default <out>/synthetic.csv)");

    auto add_training_options = [&](CLI::App* sub) {
        sub->fallthrough();
        sub->add_option("--input", input, "input CSV");
        sub->add_option("--epochs", epochs);
        sub->add_option("--patience", patience);
        sub->add_option("--alpha", alpha, "domain-loss weight");
        sub->add_option("--conv-layers", conv_layers);
        sub->add_option("--lstm-layers", lstm_layers);
        sub->add_option("--cnn-hidden", cnn_hidden);
        sub->add_option("--lstm-hidden", lstm_hidden);
        sub->add_option("--dropout-cnn", dropout_cnn);
        sub->add_option("--dropout-lstm", dropout_lstm);
        sub->add_option("--batch-size", batch_size);
        sub->add_flag("--batchnorm", batchnorm, "enable batch normalization");
        sub->add_flag("--no-batchnorm", no_batchnorm, "disable batch normalization");
        sub->add_flag("--gradient-reversal", reversal, "extension: reverse the domain gradient into shared features");
        sub->add_option("--drop-features", drop_features, "feature columns removed during cleaning");
    };
    auto* train = app.add_subcommand("train", "LOSO training of one (W, H, hyperparameter) configuration");
    add_training_options(train);
    train->add_option("--model", model_name, "adast, mlp, cnn, bilstm or gru");
    train->add_option("--window", window, "input window W (days)");
    train->add_option("--horizon", horizon, "predicting window H (days)");
    train->add_option("--search-trials", search_trials, "random-search trials before training (0 = off)");

    auto* grid = app.add_subcommand("grid", "LOSO evaluation over the (W, H) grid");
    add_training_options(grid);
    grid->add_option("--windows", windows, "input windows")->delimiter(',');
    grid->add_option("--horizons", horizons, "predicting windows")->delimiter(',');
    grid->add_option("--models", models, "models to evaluate")->delimiter(',');

    auto* rep = app.add_subcommand("report", "summarize results files");
    rep->fallthrough();
    rep->add_option("files", report_files, "results.json files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUser;
    }

    try {
        RunConfig cfg;
        if (*o_config) load_config_file(config_path, cfg);
        if (*o_seed) cfg.seed = seed;
        if (*o_jobs) cfg.jobs = jobs;
        if (*o_out) cfg.out = out_dir;
        if (subjects) cfg.generate.n_subjects = *subjects;
        if (days) cfg.generate.n_days = *days;
        if (shift) cfg.generate.shift_strength = *shift;
        if (anomaly) cfg.generate.anomaly_rate = *anomaly;
        if (missing) cfg.generate.missing_rate = *missing;
        if (output) cfg.generate_output = *output;
        if (input) cfg.input = *input;
        if (model_name) cfg.model = *model_name;
        if (window) cfg.window.input_window = *window;
        if (horizon) cfg.window.horizon = *horizon;
        if (search_trials) cfg.search_trials = *search_trials;
        if (epochs) cfg.epochs = *epochs;
        if (patience) cfg.patience = *patience;
        if (alpha) cfg.hyperparams.alpha = *alpha;
        if (conv_layers) cfg.hyperparams.num_conv_layers = *conv_layers;
        if (lstm_layers) cfg.hyperparams.num_lstm_layers = *lstm_layers;
        if (cnn_hidden) cfg.hyperparams.cnn_hidden_size = *cnn_hidden;
        if (lstm_hidden) cfg.hyperparams.lstm_hidden_size = *lstm_hidden;
        if (dropout_cnn) cfg.hyperparams.dropout_cnn = *dropout_cnn;
        if (dropout_lstm) cfg.hyperparams.dropout_lstm = *dropout_lstm;
        if (batch_size) cfg.hyperparams.batch_size = *batch_size;
        if (batchnorm) cfg.hyperparams.use_batchnorm = true;
        if (no_batchnorm) cfg.hyperparams.use_batchnorm = false;
        if (reversal) cfg.gradient_reversal = true;
        if (drop_features) cfg.drop_features = *drop_features;
        if (windows) cfg.grid_windows = *windows;
        if (horizons) cfg.grid_horizons = *horizons;
        if (models) cfg.grid_models = *models;
        if (cfg.jobs < 1) throw ConfigError("--jobs must be at least 1");

        if (gen->parsed()) return cmd_generate(cfg, out);
        if (train->parsed()) return cmd_train(cfg, out);
        if (grid->parsed()) return cmd_grid(cfg, out);
        return cmd_report(cfg, report_files, out);
    } catch (const TrainingDivergence& e) {
        err << "error: training diverged: " << e.what() << '\n';
        return kExitInternal;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const ConflictError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const TooShortError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const FitError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUser;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace adast::cli
