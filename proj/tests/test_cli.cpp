// Drives the command-line binary end to end: exit codes, artifacts,
// determinism. argv[1] = binary path, argv[2] = scratch directory.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

std::string g_binary;
fs::path g_work;
int g_failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAILED", what.c_str());
    if (!ok) ++g_failures;
}

int run_command(const std::string& args, std::string* output = nullptr) {
    const fs::path log = g_work / "last_output.txt";
    const std::string command = g_binary + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    if (output) {
        std::ifstream in(log);
        std::stringstream buffer;
        buffer << in.rdbuf();
        *output = buffer.str();
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_config(const fs::path& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void test_validate() {
    write_config(g_work / "bad.json", R"({
        "task": "folner",
        "group": {"kind": "regular_tree", "tree_degree": 3},
        "region": {"radius": -2}
    })");
    std::string output;
    const int code = run_command("validate --config " + (g_work / "bad.json").string(), &output);
    check(code == 2, "validate rejects tree folner config with exit code 2");
    check(output.find("non-amenable") != std::string::npos,
          "diagnostics mention the non-amenable built-in");
    check(output.find("radius") != std::string::npos,
          "diagnostics also mention the negative radius");

    write_config(g_work / "good.json", R"({
        "task": "ids",
        "group": {"kind": "int_lattice", "dim": 1},
        "params": {"n_values": [50]}
    })");
    check(run_command("validate --config " + (g_work / "good.json").string()) == 0,
          "validate accepts a well-formed ids config");
}

void test_ids_determinism() {
    write_config(g_work / "ids.json", R"({
        "group": {"kind": "int_lattice", "dim": 1},
        "params": {"n_values": [200], "grid_step": 0.01}
    })");
    const fs::path out1 = g_work / "ids-run1";
    const fs::path out2 = g_work / "ids-run2";
    const std::string base = "ids --config " + (g_work / "ids.json").string();
    check(run_command(base + " --output-dir " + out1.string()) == 0, "ids run 1 exits 0");
    check(run_command(base + " --output-dir " + out2.string()) == 0, "ids run 2 exits 0");
    const std::string curve1 = slurp(out1 / "ids_n200.txt");
    check(!curve1.empty() && curve1 == slurp(out2 / "ids_n200.txt"),
          "identical configs produce byte-identical curves");

    std::string output;
    run_command(base + " --output-dir " + (g_work / "ids-run3").string(), &output);
    check(output.find("sup_deviation_from_exact_line_ids") != std::string::npos,
          "line ids reports the deviation from the closed form");
}

void test_eigensearch_flat_band() {
    write_config(g_work / "eig.json", R"({
        "group": {"kind": "int_cross_c2"},
        "generators": {"name": "diagonal"},
        "region": {"kind": "explicit", "vertices": ["0|0", "0|1"]}
    })");
    std::string output;
    const int code = run_command("eigensearch --config " + (g_work / "eig.json").string() +
                                     " --output-dir " + (g_work / "eig-out").string(),
                                 &output);
    check(code == 0, "eigensearch exits 0");
    check(output.find("1.2") != std::string::npos, "record contains the 6/5 eigenvalue");
    check(fs::exists(g_work / "eig-out" / "eigensearch.txt"), "eigensearch artifact written");
    check(fs::exists(g_work / "eig-out" / "report.json"), "run report written");
}

void test_exhaust_both_ways() {
    write_config(g_work / "exh.json", R"({
        "group": {"kind": "int_cross_c2"},
        "generators": {"name": "ladder"},
        "region": {"kind": "strip", "n": 1}
    })");
    std::string output;
    check(run_command("exhaust --config " + (g_work / "exh.json").string() + " --output-dir " +
                          (g_work / "exh-out").string(),
                      &output) == 0,
          "ladder exhaust exits 0");
    check(output.find("\"status\": \"found\"") != std::string::npos &&
              output.find("\"steps\": 6") != std::string::npos,
          "ladder strip certificate has 6 steps");
    check(fs::exists(g_work / "exh-out" / "certificate.txt"), "certificate artifact written");

    check(run_command("exhaust --config " + (g_work / "exh.json").string() +
                          " --gens diagonal --output-dir " + (g_work / "exh-none").string(),
                      &output) == 0,
          "diagonal exhaust exits 0");
    check(output.find("\"status\": \"none\"") != std::string::npos,
          "diagonal strip reports none");
}

void test_exit_codes() {
    std::string output;
    write_config(g_work / "cap.json", R"({
        "group": {"kind": "lamplighter"},
        "generators": {"name": "ac"},
        "region": {"kind": "ball", "radius": 12},
        "vertex_cap": 50
    })");
    const int resource = run_command("eigensearch --config " + (g_work / "cap.json").string(),
                                     &output);
    check(resource == 4, "vertex cap exceeded exits with the resource code 4");

    const int unknown = run_command("folner --group regular_tree", &output);
    check(unknown == 2, "tree folner run exits with the validation code 2");
}

void test_heightcheck_and_moments() {
    std::string output;
    check(run_command("heightcheck --group lamplighter --gens ac --heights [1,0] "
                      "--output-dir " +
                          (g_work / "h-out").string(),
                      &output) == 0,
          "lamplighter heightcheck exits 0");
    check(output.find("\"accepted\": true") != std::string::npos &&
              output.find("\"violations\": 0") != std::string::npos,
          "heights accepted with zero axiom violations");

    check(run_command("moments --group int_lattice --output-dir " +
                          (g_work / "m-out").string(),
                      &output) == 0,
          "moments exits 0");
    const std::string moments = slurp(g_work / "m-out" / "moments.txt");
    check(moments.find("2 1.5") != std::string::npos, "second moment is 3/2");
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: cli_tests <binary> <workdir>\n";
        return 2;
    }
    g_binary = argv[1];
    g_work = argv[2];
    fs::create_directories(g_work);

    test_validate();
    test_ids_determinism();
    test_eigensearch_flat_band();
    test_exhaust_both_ways();
    test_exit_codes();
    test_heightcheck_and_moments();

    std::printf("%d failures\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
