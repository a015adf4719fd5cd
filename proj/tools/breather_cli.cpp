// breather — time-periodic, spatially localized solutions of the quasilinear
// wave equation g(x) w_tt - w_xx + gamma delta_0(x) (w_t^3)_t = 0.
//
// Usage:
//   breather analyze <config> [--set section.key=value]... [--jobs n]
//   breather solve   <config> [--set section.key=value]... [--jobs n]
//   breather scan    <config> [--set section.key=value]... [--jobs n]
//
// Exit codes: 0 ok, 1 config error, 2 medium not admissible, 3 no spectral
// gap, 4 sign condition failed, 5 iteration budget exhausted, 6 verification
// gate failed.

#include <iostream>
#include <string>
#include <vector>

#include "breather/json_schema.hpp"
#include "breather/run.hpp"

namespace {

int usage() {
    std::cerr << "usage: breather analyze|solve|scan <config> [--set k=v]... [--jobs n]\n";
    return breather::cli::exit_config;
}

} // namespace

int main(int argc, char** argv) {
    using namespace breather;

    if (argc < 3) return usage();
    const std::string command = argv[1];
    const std::string config_path = argv[2];
    std::vector<std::string> overrides;
    int jobs = 1;
    for (int i = 3; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--set" && i + 1 < argc) {
            overrides.emplace_back(argv[++i]);
        } else if (arg == "--jobs" && i + 1 < argc) {
            try {
                jobs = std::stoi(argv[++i]);
            } catch (const std::exception&) {
                return usage();
            }
        } else {
            return usage();
        }
    }
    if (command != "analyze" && command != "solve" && command != "scan") return usage();

    try {
        cli::KeyValues kv = cli::parse_config_file(config_path);
        cli::apply_overrides(kv, overrides);
        cli::RunConfig rc = cli::build_run_config(kv);
        rc.jobs = jobs;

        if (command == "analyze") {
            const auto out = cli::run_analyze(rc);
            std::filesystem::create_directories(rc.out_dir);
            cli::detail::write_text(std::filesystem::path(rc.out_dir) / "analyze.json",
                                    out.report.dump(2) + "\n");
            std::cout << out.text;
            return out.exit_code;
        }
        if (command == "solve") {
            const auto out = cli::run_solve(rc);
            std::cout << "J = " << out.result["J"].get<double>()
                      << ", grad = " << out.result["grad_norm"].get<double>()
                      << ", converged = " << out.result["converged"].get<bool>() << "\n";
            return out.exit_code;
        }
        const auto out = cli::run_scan(rc);
        std::cout << "j    r      N      J            converged\n";
        for (const auto& row : out.summary["stages"]) {
            std::cout << row["j"].get<int>() << "    " << row["r"].get<long>() << "    "
                      << row["N"].get<int>() << "    "
                      << (row.contains("J") ? std::to_string(row["J"].get<double>()) : "-")
                      << "    " << (row["converged"].get<bool>() ? "yes" : "no") << "\n";
        }
        return out.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_code_for_current_exception();
    }
}
