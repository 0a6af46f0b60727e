// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "adast/cli/commands.hpp"
#include "adast/data/synthetic.hpp"
#include "adast/model/adast_model.hpp"
#include "adast/nn/batchnorm.hpp"
#include "adast/nn/conv1d.hpp"
#include "adast/nn/linear.hpp"
#include "adast/nn/loss.hpp"
#include "adast/nn/recurrent.hpp"
#include "adast/windowing.hpp"
#include "test_support.hpp"

using namespace adast;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kLayerTol = 1e-4;
constexpr double kModelTol = 1e-3;
constexpr int kGradTrials = 20;
constexpr double kGradBudgetSec = 60.0;
constexpr int kWindowTriples = 100;
constexpr double kWindowBudgetSec = 10.0;
constexpr double kLosoBudgetSec = 10.0;
constexpr double kMinLossReduction = 0.30;
constexpr std::size_t kMinFoldWins = 12;
constexpr double kLearningBudgetSec = 15.0 * 60.0;

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.uniform_index(hi - lo + 1); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int cli(std::vector<std::string> args, std::string* captured = nullptr) {
    args.insert(args.begin(), "adast");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (captured) *captured = out.str();
    if (code != 0) std::cerr << err.str();
    return code;
}

Outcome gradient_suite() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    auto note = [&](double e) { worst = std::max(worst, e); };
    using namespace nn;
    for (int trial = 0; trial < kGradTrials; ++trial) {
        Rng rng(10'000 + trial);
        const std::size_t b = pick(rng, 2, 4), c = pick(rng, 1, 4), c2 = pick(rng, 1, 4), t = pick(rng, 1, 8);
        {
            Tensor x = test::random_tensor({b, c, t}, rng);
            Conv1d conv(c, c2, rng);
            const auto probe = test::make_probe({b, c2, t}, rng);
            const Tensor dx = conv.backward((conv.forward(x), probe.r));
            ParameterRefs ps;
            conv.collect(ps);
            note(test::check_params([&] { return probe(conv.forward(x)); }, ps, &x, &dx));
        }
        {
            Tensor x = test::random_tensor({b, c, t}, rng, -2, 2);
            BatchNorm1d bn(c);
            ParameterRefs ps;
            bn.collect(ps);
            ps[0]->value = test::random_tensor({c}, rng, 0.5, 1.5);
            const auto probe = test::make_probe({b, c, t}, rng);
            const Tensor dx = bn.backward((bn.forward(x, Mode::train), probe.r));
            note(test::check_params([&] { return probe(bn.forward(x, Mode::train)); }, ps, &x, &dx));
        }
        {
            Tensor x = test::random_tensor({b, t}, rng);
            Linear lin(t, c2, rng);
            const auto probe = test::make_probe({b, c2}, rng);
            const Tensor dx = lin.backward((lin.forward(x), probe.r));
            ParameterRefs ps;
            lin.collect(ps);
            note(test::check_params([&] { return probe(lin.forward(x)); }, ps, &x, &dx));
        }
        {
            Tensor x = test::random_tensor({b, c, t}, rng);
            for (double& v : x.data())
                if (std::abs(v) < 1e-3) v = 0.5;
            const auto probe = test::make_probe({b, c, t}, rng);
            const Tensor dx = relu_backward(x, probe.r);
            note(test::check_params([&] { return probe(relu(x)); }, {}, &x, &dx));
        }
        auto recurrent = [&](auto tag) {
            using Stack = typename decltype(tag)::type;
            const std::size_t h = pick(rng, 1, 4), layers = pick(rng, 1, 2);
            Tensor x = test::random_tensor({b, t, c}, rng);
            Stack stack(c, h, layers, 0.25, rng);
            const std::uint64_t drop_seed = rng.next_u64();
            const auto probe = test::make_probe({b, t, h}, rng);
            Rng r0(drop_seed);
            stack.forward(x, Mode::train, r0);
            const Tensor dx = stack.backward(probe.r);
            ParameterRefs ps;
            stack.collect(ps);
            note(test::check_params(
                [&] {
                    Rng r(drop_seed);
                    return probe(stack.forward(x, Mode::train, r).h_all);
                },
                ps, &x, &dx));
        };
        recurrent(std::type_identity<Lstm>{});
        recurrent(std::type_identity<Gru>{});
        {
            Tensor logits = test::random_tensor({b, c + 1}, rng, -3, 3);
            std::vector<int> labels(b);
            for (int& l : labels) l = static_cast<int>(rng.uniform_index(c + 1));
            const Tensor g = softmax_cross_entropy(logits, labels).grad;
            note(test::check_params([&] { return softmax_cross_entropy(logits, labels).value; }, {}, &logits, &g));
            Tensor pred = test::random_tensor({b, c}, rng);
            const Tensor target = test::random_tensor({b, c}, rng);
            const Tensor gr = rmse_loss(pred, target).grad;
            note(test::check_params([&] { return rmse_loss(pred, target).value; }, {}, &pred, &gr));
        }
    }
    const double layer_worst = worst;
    worst = 0.0;
    int model_cases = 0;
    for (int conv = 1; conv <= 2; ++conv)
        for (int lstm = 1; lstm <= 2; ++lstm)
            for (double alpha : {0.0, 0.5}) {
                model::HyperParams hp;
                hp.num_conv_layers = conv;
                hp.num_lstm_layers = lstm;
                hp.cnn_hidden_size = 4;
                hp.lstm_hidden_size = 8;
                hp.dropout_cnn = hp.dropout_lstm = 0.0;
                hp.use_batchnorm = false;
                Rng rng(20'000 + model_cases++);
                model::AdaSTModel m(hp, {3, 3, 1, 2}, rng, {false, false});
                const Tensor x = test::random_tensor({4, 3, 3}, rng);
                const Tensor y = test::random_tensor({4, 1}, rng, 0.0, 1.0);
                const std::vector<int> labels{0, 1, 1, 0};
                m.zero_grad();
                auto out = m.forward(x, true);
                LossResult dom = softmax_cross_entropy(*out.domain_logits, labels);
                dom.grad *= alpha;
                m.backward(rmse_loss(out.y, y).grad, &dom.grad);
                note(test::check_params(
                    [&] {
                        auto o = m.forward(x, true);
                        return rmse_loss(o.y, y).value + alpha * softmax_cross_entropy(*o.domain_logits, labels).value;
                    },
                    m.parameters()));
            }
    const double secs = since(t0);
    Outcome o;
    o.pass = layer_worst < kLayerTol && worst < kModelTol && secs < kGradBudgetSec;
    std::ostringstream d;
    d << "layer max rel err " << layer_worst << " over " << kGradTrials << " shapes each, model max rel err " << worst
      << " over " << model_cases << " configs, " << secs << " s";
    o.detail = d.str();
    return o;
}

Outcome windowing_oracle() {
    const auto t0 = Clock::now();
    Rng rng(30'000);
    std::size_t mismatches = 0, leaks = 0, instances = 0;
    const data::Date start{std::chrono::year{2024} / 1 / 1};
    for (int trial = 0; trial < kWindowTriples; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(50), w = 1 + rng.uniform_index(11), h = 1 + rng.uniform_index(9);
        data::SubjectDataset ds;
        ds.subject_id = 1;
        ds.feature_names = {"day"};
        for (std::size_t d = 0; d < n; ++d)
            ds.records.push_back({start + std::chrono::days{static_cast<int>(d)}, {static_cast<double>(d)},
                                  static_cast<double>(d)});
        std::size_t brute = 0;
        for (std::size_t s = 0; s < n; ++s) brute += s + w + h <= n;
        const auto inst = windowing::slide(ds, {w, h, 1});
        mismatches += inst.size() != brute;
        for (const auto& x : inst) {
            ++instances;
            const double last_input = x.x.at(w - 1, 0);
            for (std::size_t j = 0; j < h; ++j) leaks += x.y[j] != last_input + 1.0 + static_cast<double>(j);
            for (std::size_t t = 0; t < w; ++t)
                for (std::size_t j = 0; j < h; ++j) leaks += x.x.at(t, 0) == x.y[j];
        }
    }
    const double secs = since(t0);
    std::ostringstream d;
    d << kWindowTriples << " triples, " << mismatches << " count mismatches, " << leaks << " leakage violations over "
      << instances << " instances, " << secs << " s";
    return {mismatches == 0 && leaks == 0 && secs < kWindowBudgetSec, d.str()};
}

Outcome loso_integrity() {
    const auto t0 = Clock::now();
    const auto data = experiment::prepare(data::generate_synthetic({16, 120, 0.5, 0.02, 0.02}, 7));
    const auto folds = experiment::loso_folds(data.subject_ids());
    std::size_t bad = 0;
    std::set<int> tests;
    for (const auto& f : folds) {
        const std::set<int> train(f.train_subjects.begin(), f.train_subjects.end());
        bad += train.size() != 14 || train.count(f.test_subject) || train.count(f.val_subject) ||
               f.test_subject == f.val_subject;
        tests.insert(f.test_subject);
        const auto fd = experiment::build_fold_data(data, f, {7, 1, 1});
        experiment::verify_lineage(fd);
        bad += fd.normalizer.fitted_subjects != train;
        for (const auto& i : fd.train) bad += !train.count(i.subject_id);
        for (const auto& i : fd.val) bad += i.subject_id != f.val_subject;
        for (const auto& i : fd.test) bad += i.subject_id != f.test_subject;
    }
    const double secs = since(t0);
    std::ostringstream d;
    d << folds.size() << " folds, " << tests.size() << " distinct test subjects, " << bad << " violations, " << secs
      << " s";
    return {folds.size() == 16 && tests.size() == 16 && bad == 0 && secs < kLosoBudgetSec, d.str()};
}

Outcome alpha_semantics() {
    const auto data = experiment::prepare(data::generate_synthetic({4, 60, 0.5, 0.02, 0.02}, 5));
    const auto fd = experiment::build_fold_data(data, experiment::loso_folds(data.subject_ids())[0], {7, 1, 1});
    model::HyperParams hp;
    hp.alpha = 0.0;
    Rng rng(40'000);
    model::AdaSTModel m(hp, {data.feature_names.size(), 7, 1, 4}, rng, {true, false});
    experiment::TrainConfig cfg;
    cfg.epochs = 3;
    cfg.alpha = 0.0;
    cfg.batch_size = static_cast<std::size_t>(hp.batch_size);
    std::size_t steps = 0, loss_mismatch = 0, nonzero_grads = 0;
    auto observer = [&](const experiment::StepInfo& s) {
        ++steps;
        loss_mismatch += s.total_loss != s.main_loss;
        for (const nn::Parameter* p : m.domain_head_parameters())
            for (double g : p->grad.values()) nonzero_grads += g != 0.0;
    };
    experiment::train(m, fd.train, fd.val, cfg, experiment::DomainMap(data.subject_ids()), nullptr, observer);
    std::ostringstream d;
    d << steps << " steps, " << loss_mismatch << " with total != main, " << nonzero_grads
      << " nonzero domain-head gradient entries";
    return {steps > 0 && loss_mismatch == 0 && nonzero_grads == 0, d.str()};
}

Outcome learning_check() {
    const auto t0 = Clock::now();
    const auto data = experiment::prepare(data::generate_synthetic({16, 120, 0.5, 0.02, 0.02}, 7));
    experiment::RunSpec spec;
    spec.window = {7, 1, 1};
    spec.train.epochs = 50;
    spec.seed = 7;
    const auto cell = experiment::run_loso(data, spec);
    std::size_t wins = 0, folds = 0;
    double worst_reduction = 1.0;
    for (const auto& f : cell.folds) {
        if (f.skipped) continue;
        ++folds;
        wins += f.test_rmse < f.subject_mean_rmse;
        const double best = *std::min_element(f.history.train_main.begin(), f.history.train_main.end());
        worst_reduction = std::min(worst_reduction, 1.0 - best / f.history.initial_train_main);
    }
    const double secs = since(t0);
    std::ostringstream d;
    d << wins << "/" << folds << " folds beat the subject-mean predictor, smallest training L_main reduction "
      << worst_reduction * 100.0 << "%, mean test RMSE " << cell.mean_test_rmse << ", " << secs << " s";
    return {folds == 16 && wins >= kMinFoldWins && worst_reduction >= kMinLossReduction && secs < kLearningBudgetSec,
            d.str()};
}

Outcome grid_shape_and_trend(const fs::path& work) {
    const fs::path csv = work / "grid_data.csv";
    if (cli({"--seed", "11", "generate", "--subjects", "6", "--days", "100", "--output", csv.string()}) != 0)
        return {false, "generate failed"};
    std::string printed;
    if (cli({"--seed", "11", "--out", (work / "grid").string(), "grid", "--input", csv.string(), "--epochs", "40",
             "--patience", "10"},
            &printed) != 0)
        return {false, "grid command failed"};
    const auto results = experiment::read_results((work / "grid" / "results.json").string());
    const auto& g = results.models.at(0);
    std::size_t filled = 0, violations = 0;
    std::ostringstream d;
    for (const auto& c : g.cells) filled += !c.empty;
    for (std::size_t w : experiment::default_input_windows()) {
        const auto* h1 = g.find(w, 1);
        const auto* h9 = g.find(w, 9);
        if (!h1 || !h9 || h1->empty || h9->empty) {
            ++violations;
            continue;
        }
        violations += h1->mean_test_rmse > h9->mean_test_rmse;
        d << "W" << w << " " << h1->mean_test_rmse << "/" << h9->mean_test_rmse << " ";
    }
    d << "(H1/H9); " << filled << "/" << g.cells.size() << " cells filled";
    return {g.cells.size() == 25 && filled == 25 && violations == 0, d.str()};
}

Outcome determinism(const fs::path& work) {
    const fs::path csv = work / "smoke.csv";
    if (cli({"--seed", "21", "generate", "--subjects", "3", "--days", "40", "--output", csv.string()}) != 0)
        return {false, "generate failed"};
    for (const char* dir : {"run_a", "run_b"})
        if (cli({"--seed", "21", "--out", (work / dir).string(), "train", "--input", csv.string(), "--epochs", "3"}) !=
            0)
            return {false, "train failed"};
    const std::string a = slurp(work / "run_a" / "results.json"), b = slurp(work / "run_b" / "results.json");
    std::ostringstream d;
    d << "results.json " << a.size() << " bytes, " << (a == b ? "identical" : "different");
    return {!a.empty() && a == b, d.str()};
}

Outcome reference_status(const fs::path& work) {
    std::string printed;
    if (cli({"--out", (work / "run_a").string(), "report", (work / "run_a" / "results.json").string()}, &printed) != 0)
        return {false, "report failed"};
    const std::string header = printed.substr(0, printed.find('\n', printed.find("reference")));
    bool ok = header.find("not reproducible") != std::string::npos;
    for (const char* value : {"0.282", "0.3047-0.4244", "0.303"}) ok = ok && header.find(value) != std::string::npos;
    return {ok, "report header: " + header.substr(header.find("reference"))};
}

}  // namespace

int main() {
    const fs::path work = fs::temp_directory_path() / "adast_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"gradient suite", gradient_suite},
        {"windowing oracle", windowing_oracle},
        {"LOSO integrity", loso_integrity},
        {"alpha semantics", alpha_semantics},
        {"learning check", learning_check},
        {"grid shape and trend", [&] { return grid_shape_and_trend(work); }},
        {"determinism", [&] { return determinism(work); }},
        {"reference constants", [&] { return reference_status(work); }},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
