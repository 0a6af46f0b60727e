#include <gtest/gtest.h>
#include <sys/wait.h>

#include <chrono>
#include <fstream>
#include <regex>
#include <sstream>

#include "adast/cli/commands.hpp"
#include "adast/data/csv.hpp"
#include "test_support.hpp"

using namespace adast;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "adast");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// Tag balance plus a root <svg> element; enough to catch truncated or interleaved output.
bool well_formed_xml(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t roots = 0;
    for (std::size_t i = text.find('<'); i != std::string::npos; i = text.find('<', i + 1)) {
        const std::size_t end = text.find('>', i);
        if (end == std::string::npos) return false;
        std::string tag = text.substr(i + 1, end - i - 1);
        if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
        if (tag[0] == '/') {
            const std::string name = tag.substr(1);
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
            continue;
        }
        const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
        if (stack.empty()) ++roots;
        if (tag.back() != '/') stack.push_back(name);
    }
    return stack.empty() && roots == 1 && text.find("<svg") != std::string::npos;
}

fs::path small_csv(const fs::path& dir, std::size_t subjects = 3, std::size_t days = 40) {
    const fs::path csv = dir / "data.csv";
    const CliRun g = run({"generate", "--subjects", std::to_string(subjects), "--days", std::to_string(days), "--seed", "5",
                       "--output", csv.string()});
    EXPECT_EQ(g.code, 0) << g.err;
    return csv;
}

}  // namespace

TEST(Cli, GenerateIsSeededAndByteIdentical) {
    const fs::path dir = test::temp_dir("cli_gen");
    for (const char* name : {"a.csv", "b.csv"}) {
        const CliRun r = run({"generate", "--subjects", "16", "--days", "120", "--seed", "7", "--output",
                           (dir / name).string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    const auto parsed = data::parse_csv((dir / "a.csv").string());
    EXPECT_EQ(parsed.size(), 16u);
    for (const auto& s : parsed) EXPECT_EQ(s.records.size(), 120u);
    EXPECT_TRUE(fs::exists(dir / "a.csv.config.json"));
    const auto sidecar = nlohmann::json::parse(slurp(dir / "a.csv.config.json"));
    EXPECT_EQ(sidecar["seed"], 7);
}

TEST(Cli, UserErrorsExitTwo) {
    const fs::path dir = test::temp_dir("cli_err");
    EXPECT_EQ(run({"generate", "--days", "5", "--output", (dir / "x.csv").string()}).code, 2);
    const CliRun missing = run({"train", "--input", (dir / "nope.csv").string()});
    EXPECT_EQ(missing.code, 2);
    EXPECT_NE(missing.err.find("nope.csv"), std::string::npos);
    EXPECT_EQ(run({"--bogus"}).code, 2);
    EXPECT_EQ(run({}).code, 2);

    {
        std::ofstream cfg(dir / "bad.json");
        cfg << R"({"seed": 1, "learning_rate_typo": 0.1})";
    }
    const CliRun bad = run({"--config", (dir / "bad.json").string(), "generate"});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("learning_rate_typo"), std::string::npos);

    const fs::path csv = small_csv(dir);
    EXPECT_EQ(run({"train", "--input", csv.string(), "--lstm-hidden", "32"}).code, 2);
    EXPECT_EQ(run({"train", "--input", csv.string(), "--model", "transformer"}).code, 2);
    EXPECT_EQ(run({"train", "--input", csv.string(), "--alpha", "1.5"}).code, 2);

    {
        std::ofstream broken(dir / "broken.csv");
        broken << "subject_id,date,sleep_score\n1,2020-01-01\n";
    }
    EXPECT_EQ(run({"train", "--input", (dir / "broken.csv").string()}).code, 2);
    {
        // subjects 2 and 3 have no scored days, so the first fold has nothing to fit on
        std::ofstream unscored(dir / "unscored.csv");
        unscored << "subject_id,date,steps,sleep_score\n";
        for (int s = 1; s <= 3; ++s)
            for (int d = 10; d < 30; ++d)
                unscored << s << ",2024-01-" << d << "," << d * 100 << "," << (s == 1 ? "70" : "") << "\n";
    }
    const CliRun unfit = run({"train", "--input", (dir / "unscored.csv").string(), "--epochs", "1"});
    EXPECT_EQ(unfit.code, 2) << unfit.err;
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, TrainSmokeRunEchoesConfig) {
    const fs::path dir = test::temp_dir("cli_train");
    const fs::path csv = small_csv(dir);
    const auto t0 = std::chrono::steady_clock::now();
    const CliRun r = run({"--seed", "3", "--out", (dir / "out").string(), "train", "--input", csv.string(), "--epochs",
                       "3", "--alpha", "0.0", "--window", "5", "--horizon", "1"});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(secs, 60.0);
    EXPECT_NE(r.out.find("epoch"), std::string::npos);
    const auto results = nlohmann::json::parse(slurp(dir / "out" / "results.json"));
    EXPECT_EQ(results["seed"], 3);
    EXPECT_EQ(results["config"]["hyperparams"]["alpha"], 0.0);
    EXPECT_EQ(results["config"]["window"]["input_window"], 5);
    std::size_t checkpoints = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "out" / "checkpoints")) ++checkpoints;
    EXPECT_EQ(checkpoints, 3u);
    EXPECT_TRUE(fs::exists(dir / "out" / "grid.csv"));
    EXPECT_TRUE(fs::exists(dir / "out" / "timing.json"));
}

TEST(Cli, GridSubsetReportAndArtifacts) {
    const fs::path dir = test::temp_dir("cli_grid");
    const fs::path csv = small_csv(dir, 3, 30);
    const fs::path out = dir / "out";
    const CliRun g = run({"--out", out.string(), "grid", "--input", csv.string(), "--epochs", "2", "--windows", "3,20",
                       "--horizons", "1,9", "--models", "adast,mlp"});
    ASSERT_EQ(g.code, 0) << g.err;
    const auto results = nlohmann::json::parse(slurp(out / "results.json"));
    ASSERT_EQ(results["models"].size(), 2u);
    std::size_t empty = 0, cells = 0;
    for (const auto& m : results["models"])
        for (const auto& c : m["cells"]) {
            ++cells;
            if (c["empty"].get<bool>()) ++empty;
        }
    EXPECT_EQ(cells, 2u * 2 * 2);
    EXPECT_EQ(empty, 2u);  // W=20, H=9 does not fit 30 days
    const std::regex cell_line(R"((adast|mlp) W=\d+ H=\d+ mean_test_rmse=)");
    std::size_t printed = 0;
    std::istringstream lines(g.out);
    for (std::string line; std::getline(lines, line);)
        if (std::regex_search(line, cell_line)) ++printed;
    EXPECT_EQ(printed, cells - empty);

    for (const char* svg : {"radar.svg", "lineplot_adast.svg", "lineplot_mlp.svg"})
        EXPECT_TRUE(well_formed_xml(slurp(out / svg))) << svg;
    EXPECT_TRUE(fs::exists(out / "radar.csv"));

    const CliRun rep = run({"--out", out.string(), "report", (out / "results.json").string()});
    ASSERT_EQ(rep.code, 0) << rep.err;
    EXPECT_NE(rep.out.find("best cell: model="), std::string::npos);
    EXPECT_NE(rep.out.find("0.282"), std::string::npos);
    EXPECT_NE(rep.out.find("0.3047-0.4244"), std::string::npos);
    EXPECT_NE(rep.out.find("0.303"), std::string::npos);
    EXPECT_NE(rep.out.find("not reproducible"), std::string::npos);

    std::size_t series = 0;
    for (const auto& e : fs::directory_iterator(out / "report")) {
        ++series;
        std::istringstream body(slurp(e.path()));
        std::string line;
        std::getline(body, line);
        EXPECT_EQ(line, "date,split,subject,true_score,predicted_score");
        std::size_t rows = 0;
        while (std::getline(body, line)) ++rows;
        EXPECT_GT(rows, 0u);
    }
    EXPECT_EQ(series, 3u);
}

TEST(Cli, CorruptResultsFileIsNamed) {
    const fs::path dir = test::temp_dir("cli_corrupt");
    {
        std::ofstream bad(dir / "results.json");
        bad << "{\"format\": ";
    }
    const CliRun r = run({"--out", dir.string(), "report", (dir / "results.json").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("results.json"), std::string::npos);
}

TEST(Cli, BinaryExitCodes) {
    const std::string bin = ADAST_CLI_PATH;
    auto status = [&](const std::string& args) {
        const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status("--help"), 0);
    EXPECT_EQ(status("train --input /nonexistent/data.csv"), 2);
    EXPECT_EQ(status("generate --days 5 --output /tmp/adast_never.csv"), 2);
}
