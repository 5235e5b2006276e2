// End-to-end checks of the CLI binary: exit codes, artifact layout, and
// reproducibility of numeric outputs across reruns.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("axel_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(AXELGNN_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

}  // namespace

TEST_CASE("missing task key exits 2 and names the key") {
    TempDir tmp;
    write(tmp.path / "cfg.json", "{}");
    const std::string cmd = std::string(AXELGNN_BIN) + " train --config " +
                            (tmp.path / "cfg.json").string() + " 2> " +
                            (tmp.path / "err.txt").string();
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
    CHECK(slurp(tmp.path / "err.txt").find("task") != std::string::npos);
}

TEST_CASE("invalid json config exits 2") {
    TempDir tmp;
    write(tmp.path / "bad.json", "{not json");
    CHECK(run_cli("train --config " + (tmp.path / "bad.json").string()) == 2);
}

TEST_CASE("axelrod-sim writes a trajectory ending in equilibrium") {
    TempDir tmp;
    const fs::path out = tmp.path / "sim";
    const int code = run_cli("axelrod-sim --seed 3 --out " + out.string() +
                             " --set axelrod.L=6 --set axelrod.f=3 --set axelrod.q=4" +
                             " --set axelrod.max_steps=2000000");
    CHECK(code == 0);
    const std::string csv = slurp(out / "trajectory.csv");
    CHECK(csv.find("# config_hash=") == 0);
    CHECK(csv.find("step,mean_similarity,region_count,is_equilibrium") != std::string::npos);
    // last data row must flag equilibrium
    std::istringstream is(csv);
    std::string line, last;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#' && line.find("step") == std::string::npos)
            last = line;
    CHECK(last.substr(last.rfind(',') + 1) == "1");

    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary.at("reached_equilibrium").get<bool>());
}

TEST_CASE("node-classify run emits summary, histories, metrics and checkpoints") {
    TempDir tmp;
    const fs::path out = tmp.path / "cls";
    json cfg = {
        {"task", "node-classify"},
        {"seed", 5},
        {"repeats", 2},
        {"output_dir", out.string()},
        {"dataset",
         {{"synth",
           {{"n", 40}, {"classes", 2}, {"p_intra", 0.2}, {"p_inter", 0.02},
            {"delta", 4.0}, {"feature_dim", 4}, {"seed", 5}}}}},
        {"model", {{"variant", "sim"}, {"layers", 1}, {"hidden", 4}, {"segment", 2},
                   {"dropout", 0.0}}},
        {"train", {{"lr", 0.02}, {"max_epochs", 40}, {"patience", 40}}},
    };
    write(tmp.path / "cfg.json", cfg.dump());
    CHECK(run_cli("train --config " + (tmp.path / "cfg.json").string()) == 0);

    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary.at("metric") == "accuracy");
    CHECK(summary.at("per_run").size() == 2);
    CHECK(fs::exists(out / "history_run0.csv"));
    CHECK(fs::exists(out / "history_run1.csv"));
    CHECK(fs::exists(out / "metrics_run0.csv"));
    CHECK(fs::exists(out / "checkpoint_run0.json"));
    CHECK(fs::exists(out / "resolved_config.json"));

    // rerunning the same config reproduces the numeric artifacts exactly
    const std::string history_before = slurp(out / "history_run0.csv");
    const std::string summary_before = slurp(out / "summary.json");
    CHECK(run_cli("train --config " + (tmp.path / "cfg.json").string()) == 0);
    CHECK(slurp(out / "history_run0.csv") == history_before);
    CHECK(slurp(out / "summary.json") == summary_before);
}

TEST_CASE("influence training writes labels and mae summary") {
    TempDir tmp;
    const fs::path out = tmp.path / "inf";
    json cfg = {
        {"task", "influence"},
        {"seed", 7},
        {"repeats", 2},
        {"output_dir", out.string()},
        {"dataset",
         {{"synth", {{"n", 30}, {"classes", 2}, {"p_intra", 0.2}, {"p_inter", 0.1},
                     {"seed", 7}}}}},
        {"model", {{"variant", "sim"}, {"layers", 2}, {"hidden", 4}, {"segment", 2},
                   {"dropout", 0.0}}},
        {"train", {{"lr", 0.02}, {"max_epochs", 30}, {"patience", 30}}},
        {"diffusion", {{"model", "lt"}, {"num_simulations", 200}, {"seed_fraction", 0.1}}},
    };
    write(tmp.path / "cfg.json", cfg.dump());
    CHECK(run_cli("train --config " + (tmp.path / "cfg.json").string()) == 0);
    const json summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary.at("metric") == "mae");
    CHECK(fs::exists(out / "labels_fold0.csv"));
    CHECK(fs::exists(out / "history_fold1.csv"));
}

TEST_CASE("influence-labels emits csv plus sidecar") {
    TempDir tmp;
    const fs::path out = tmp.path / "labels";
    json cfg = {
        {"seed", 9},
        {"output_dir", out.string()},
        {"dataset", {{"synth", {{"n", 25}, {"classes", 2}, {"seed", 9}}}}},
        {"diffusion", {{"model", "sis"}, {"num_simulations", 100},
                       {"sis", {{"beta", 0.4}, {"gamma", 0.2}, {"horizon", 5}}}}},
    };
    write(tmp.path / "cfg.json", cfg.dump());
    CHECK(run_cli("influence-labels --config " + (tmp.path / "cfg.json").string()) == 0);
    CHECK(fs::exists(out / "labels.csv"));
    const json sidecar = json::parse(slurp(out / "labels_sidecar.json"));
    CHECK(sidecar.contains("config_hash"));
    CHECK(sidecar.at("note").get<std::string>().find("SIS") != std::string::npos);
}

TEST_CASE("sweep logs every grid cell") {
    TempDir tmp;
    const fs::path out = tmp.path / "sweep";
    json cfg = {
        {"task", "node-classify"},
        {"seed", 11},
        {"repeats", 1},
        {"output_dir", out.string()},
        {"dataset",
         {{"synth", {{"n", 30}, {"classes", 2}, {"p_intra", 0.25}, {"p_inter", 0.02},
                     {"delta", 4.0}, {"seed", 11}}}}},
        {"model", {{"variant", "sim"}}},
        {"train", {{"max_epochs", 15}, {"patience", 15}}},
        {"grid", {{"layers", {1, 2}}, {"lr", {0.02, 0.01}}, {"hidden", {4}},
                  {"segment", {2}}, {"weight_decay", {0.0}}, {"dropout", {0.0}}}},
    };
    write(tmp.path / "cfg.json", cfg.dump());
    CHECK(run_cli("sweep --config " + (tmp.path / "cfg.json").string()) == 0);
    const std::string csv = slurp(out / "sweep_results.csv");
    int rows = 0;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#' && line.find("layers,") == std::string::npos) ++rows;
    CHECK(rows == 4);
    CHECK(fs::exists(out / "best_config.json"));
}

TEST_CASE("bench writes timing tables") {
    TempDir tmp;
    const fs::path out = tmp.path / "bench";
    const int code = run_cli("bench --seed 2 --out " + out.string() +
                             " --set bench.nodes=[200] --set bench.dims=[16,32]" +
                             " --set bench.ladder_points=2");
    CHECK(code == 0);
    CHECK(fs::exists(out / "bench_layer.csv"));
    CHECK(fs::exists(out / "bench_aggregate.csv"));
}
