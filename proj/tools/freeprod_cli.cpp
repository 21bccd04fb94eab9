// Command-line runner: reads a JSON task config, executes it, and writes a
// JSON report to stdout or --out. Exit codes: 0 all assertions pass,
// 1 assertion failure, 2 config error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "freeprod/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"freeprod — certified numerics for reduced free products"};
    std::string config_path, out_path;
    std::uint64_t seed = 0;
    double tol = 0.0;
    bool quiet = false, with_timing = false;
    app.add_option("--config", config_path, "task config JSON path")->required();
    app.add_option("--out", out_path, "write the report to this path");
    auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
    auto* tol_opt = app.add_option("--tol", tol, "override the config tolerance");
    app.add_flag("--quiet", quiet, "suppress stdout report");
    app.add_flag("--timing", with_timing, "include timing_ms in the report");
    CLI11_PARSE(app, argc, argv);

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "ConfigError: cannot open " << config_path << "\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    freeprod::RunOptions opts;
    if (seed_opt->count() > 0) opts.seed_override = seed;
    if (tol_opt->count() > 0) opts.tol_override = tol;
    opts.with_timing = with_timing;

    std::string report, error;
    int code = freeprod::run_to_stream(buf.str(), opts, report, error);
    if (code == 2) {
        std::cerr << error << "\n";
        return 2;
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << report;
    }
    if (!quiet) std::cout << report;
    return code;
}
