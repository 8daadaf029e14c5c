// Exercises the installed binary end to end: exit codes, determinism across
// --jobs, decompose/truth-table re-ingestion, calibrate and fit outputs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_binary;
int g_failures = 0;

#define CLI_CHECK(cond, what)                                             \
    do {                                                                  \
        if (!(cond)) {                                                    \
            ++g_failures;                                                 \
            std::cerr << "FAIL " << what << " (" << #cond << ")\n";      \
        }                                                                 \
    } while (0)

int run(const std::string& args) {
    const std::string cmd = g_binary + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: qtk_cli_tests <path-to-qtk-binary>\n";
        return 2;
    }
    g_binary = argv[1];
    const fs::path dir = fs::temp_directory_path() / "qtk_cli_test";
    fs::create_directories(dir);

    // bad input exits nonzero
    CLI_CHECK(run("decompose --family qutrit -n 2") != 0, "decompose rejects n=2");
    CLI_CHECK(run("decompose --family tralse -n 3") != 0, "decompose rejects bad family");
    CLI_CHECK(run("fit --input /nonexistent.csv") != 0, "fit rejects a missing file");

    // decompose writes circuit JSON with the expected gate census
    const fs::path circ = dir / "toffoli5.json";
    CLI_CHECK(run("decompose --family qutrit -n 5 -o " + circ.string()) == 0, "decompose runs");
    {
        const json j = json::parse(slurp(circ));
        int xx = 0;
        for (const auto& ins : j["instructions"]) {
            if (ins["kind"] == "XX" || ins["kind"] == "XXTILDE") ++xx;
        }
        CLI_CHECK(xx == 7, "qutrit n=5 decomposition has 7 XX gates");
        CLI_CHECK(j["n"] == 5, "decompose JSON carries n");
    }
    const fs::path ccx = dir / "ccx.json";
    CLI_CHECK(run("decompose --family qubit -n 3 -o " + ccx.string()) == 0, "qubit decompose");
    {
        const json j = json::parse(slurp(ccx));
        int xx = 0;
        for (const auto& ins : j["instructions"]) {
            if (ins["kind"] == "XX") ++xx;
        }
        CLI_CHECK(xx == 6, "qubit n=3 decomposition has 6 XX gates");
    }

    // dot emission
    const fs::path dot = dir / "toffoli3.dot";
    CLI_CHECK(run("decompose --family qutrit -n 3 --emit dot -o " + dot.string()) == 0,
              "dot emission");
    CLI_CHECK(slurp(dot).rfind("digraph", 0) == 0, "dot output is a digraph");

    // determinism: identical seeds and different --jobs give identical JSON
    const fs::path tt1 = dir / "tt1.json";
    const fs::path tt2 = dir / "tt2.json";
    const fs::path tt3 = dir / "tt3.json";
    const std::string tt_args =
        "truth-table --family qutrit -n 3 --shots 96 --confusion-shots 64 --postselect --seed 7 ";
    CLI_CHECK(run(tt_args + "--jobs 1 -o " + tt1.string()) == 0, "truth-table jobs=1");
    CLI_CHECK(run(tt_args + "--jobs 3 -o " + tt2.string()) == 0, "truth-table jobs=3");
    CLI_CHECK(run(tt_args + "--jobs 1 -o " + tt3.string()) == 0, "truth-table repeat");
    CLI_CHECK(slurp(tt1) == slurp(tt2), "results independent of --jobs");
    CLI_CHECK(slurp(tt1) == slurp(tt3), "results reproducible under one seed");

    // decompose output re-ingested equals the integrated path
    const fs::path circ3 = dir / "toffoli3.json";
    CLI_CHECK(run("decompose --family qutrit -n 3 -o " + circ3.string()) == 0, "decompose n=3");
    const fs::path tt_inline = dir / "tt_inline.json";
    const fs::path tt_file = dir / "tt_file.json";
    const std::string base =
        "truth-table --family qutrit -n 3 --shots 64 --no-correct --seed 11 ";
    CLI_CHECK(run(base + "-o " + tt_inline.string()) == 0, "integrated truth table");
    CLI_CHECK(run(base + "--circuit " + circ3.string() + " -o " + tt_file.string()) == 0,
              "re-ingested truth table");
    CLI_CHECK(slurp(tt_inline) == slurp(tt_file), "re-ingestion matches the integrated path");

    // grover + calibrate + leak-scan + fit consistency
    const fs::path gr = dir / "grover.json";
    CLI_CHECK(run("grover --variant qutrit-mid --shots 64 --seed 5 -o " + gr.string()) == 0,
              "grover runs");
    {
        const json j = json::parse(slurp(gr));
        CLI_CHECK(j.contains("p_err") && j.contains("post_fraction"), "grover output schema");
        CLI_CHECK(j["schema"] == "1", "schema field present");
    }

    const fs::path cal = dir / "cal.json";
    CLI_CHECK(run("calibrate --chi-a 0.3 -o " + cal.string()) == 0, "calibrate runs");
    {
        const json j = json::parse(slurp(cal));
        const double rec = j["recovered_chi_a"].get<double>();
        CLI_CHECK(std::abs(rec - 0.3) < 1e-3, "calibrate recovers chi_a");
    }

    const fs::path leaks_json = dir / "leaks.json";
    const fs::path leaks_csv = dir / "leaks.csv";
    const fs::path leaks_svg = dir / "leaks.svg";
    CLI_CHECK(run("leak-scan --n-range 3..5 --shots 600 --seed 3 -o " + leaks_json.string() +
                  " --csv " + leaks_csv.string() + " --plot " + leaks_svg.string()) == 0,
              "leak-scan runs");
    const fs::path fitted = dir / "fit.json";
    CLI_CHECK(run("fit --input " + leaks_csv.string() + " -o " + fitted.string()) == 0,
              "fit runs on the CSV");
    {
        const json a = json::parse(slurp(leaks_json));
        const json b = json::parse(slurp(fitted));
        const double pa = a["fit"]["p"].get<double>();
        const double pb = b["fit"]["p"].get<double>();
        CLI_CHECK(std::abs(pa - pb) < 1e-9, "in-process and standalone fits agree");
        CLI_CHECK(slurp(leaks_svg).rfind("<svg", 0) == 0, "leak plot is SVG");
    }

    // confusion CSV
    const fs::path cm = dir / "cm.csv";
    CLI_CHECK(run("confusion -n 2 --shots-per-state 64 --seed 2 -o " + cm.string()) == 0,
              "confusion runs");
    CLI_CHECK(slurp(cm).rfind("# confusion_matrix", 0) == 0, "confusion CSV header");

    // config file: unknown keys rejected, known keys accepted
    const fs::path cfg_bad = dir / "bad.cfg";
    {
        std::ofstream out(cfg_bad);
        out << "nonsense = 1\n";
    }
    CLI_CHECK(run("--config " + cfg_bad.string() + " decompose --family qutrit -n 3") != 0,
              "unknown config keys are rejected");
    const fs::path cfg_ok = dir / "ok.cfg";
    {
        std::ofstream out(cfg_ok);
        out << "xx_fidelity = 0.9\nmaster_seed = 4\n";
    }
    CLI_CHECK(run("--config " + cfg_ok.string() +
                  " truth-table --family qutrit -n 3 --shots 16 --no-correct") == 0,
              "config file accepted");

    // QTK_SEED fallback
    {
        const fs::path s1 = dir / "seed_env1.json";
        const fs::path s2 = dir / "seed_env2.json";
        const std::string cmd = g_binary +
                                " truth-table --family qutrit -n 3 --shots 32 --no-correct -o ";
        CLI_CHECK(std::system(("QTK_SEED=123 " + cmd + s1.string() + " >/dev/null 2>&1").c_str()) == 0,
                  "env seed run 1");
        CLI_CHECK(std::system(("QTK_SEED=123 " + cmd + s2.string() + " >/dev/null 2>&1").c_str()) == 0,
                  "env seed run 2");
        CLI_CHECK(slurp(s1) == slurp(s2), "QTK_SEED pins the run");
    }

    if (g_failures == 0) {
        std::cout << "cli: all checks passed\n";
        return 0;
    }
    std::cerr << "cli: " << g_failures << " checks failed\n";
    return 1;
}
