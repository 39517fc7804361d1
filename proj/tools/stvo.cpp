// stvo run|solve|check. Exit codes: 0 ok, 1 usage or malformed input,
// 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stvo/experiment.hpp"
#include "stvo/output.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNumerical = 2;

struct RunArgs {
    std::string scenario = "exp1";
    std::vector<std::string> algorithms{"odr"};
    int runs = 0;
    int r = 0;
    double tr_ms = 0.0;
    int r_cap = 2000;
    std::uint64_t seed = 0;
    std::string out = "out";
    bool common_random = true;
    std::string config;
    bool svg = false;
};

int do_run(const RunArgs& a, const CLI::App& cmd)
{
    stvo::RunSpec spec;
    spec.scenario = stvo::parse_scenario(a.scenario);
    spec.algorithms.clear();
    for (const auto& name : a.algorithms) spec.algorithms.push_back(stvo::parse_algorithm(name));
    spec.runs = a.runs;
    if (cmd.count("--r")) spec.r = a.r;
    if (cmd.count("--tr-ms")) spec.tr_ms = a.tr_ms;
    spec.r_cap = a.r_cap;
    if (cmd.count("--seed")) spec.seed = a.seed;
    spec.out = a.out;
    spec.common_random = a.common_random;
    spec.svg = a.svg;
    if (!a.config.empty()) {
        std::ifstream is(a.config);
        if (!is) throw stvo::InvalidInput("cannot open config file '" + a.config + "'");
        spec.config = stvo::parse_config(is);
    }
    const stvo::RunReport report = stvo::run_experiment(spec, std::cerr);
    for (const auto& row : report.summary) {
        std::cout << row.algorithm << ' ' << row.metric << ' ' << stvo::format_number(row.value)
                  << '\n';
    }
    std::cout << report.files.size() << " files written to " << spec.out.string() << '\n';
    return kOk;
}

int do_solve(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw stvo::InvalidInput("cannot open problem file '" + path + "'");
    const stvo::QuadraticL1Problem problem = stvo::read_problem(is);
    const stvo::SolveReport rep = stvo::solve_problem(problem);
    std::cout << "x*";
    for (Eigen::Index i = 0; i < rep.batch.x_star.size(); ++i) {
        std::cout << ' ' << stvo::format_number(rep.batch.x_star(i));
    }
    std::cout << "\nresidual " << stvo::format_number(rep.residual) << "\niterations "
              << rep.batch.iterations << '\n';
    if (!rep.batch.converged) {
        std::cerr << "stvo: batch DR did not converge\n";
        return kNumerical;
    }
    return kOk;
}

int do_check(const std::string& dir)
{
    const stvo::CheckReport rep = stvo::check_outputs(dir);
    for (const auto& p : rep.problems) std::cout << "FAIL " << p << '\n';
    std::cout << rep.files << " files checked, " << rep.problems.size() << " problems\n";
    return rep.ok() ? kOk : kUsage;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Online tracking of sparse time-varying minimizers"};
    app.require_subcommand(1);

    RunArgs ra;
    CLI::App* run = app.add_subcommand("run", "Monte-Carlo experiment with CSV output");
    run->add_option("--scenario", ra.scenario, "exp1, exp2, rss or synthetic")
        ->check(CLI::IsMember({"exp1", "exp2", "rss", "synthetic"}));
    run->add_option("--alg", ra.algorithms, "oist, odr, odista (comma separated or repeated)")
        ->delimiter(',')
        ->check(CLI::IsMember({"oist", "odr", "odista"}));
    run->add_option("--runs", ra.runs, "Monte-Carlo runs (default 200 TVARX, 10 rss, 20 synthetic)")
        ->check(CLI::PositiveNumber);
    run->add_option("--r", ra.r, "inner iterations per round (O-DISTA: half-steps)")
        ->check(CLI::PositiveNumber);
    run->add_option("--tr-ms", ra.tr_ms, "time budget per round used to calibrate r")
        ->check(CLI::PositiveNumber);
    run->add_option("--r-cap", ra.r_cap, "upper limit for a calibrated r")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    run->add_option("--seed", ra.seed, "base seed (default 1)");
    run->add_option("--out", ra.out, "output directory")->capture_default_str();
    run->add_flag("--common-random,!--no-common-random", ra.common_random,
                  "share random numbers across algorithms (default on)");
    run->add_option("--config", ra.config, "key = value scenario file")->check(CLI::ExistingFile);
    run->add_flag("--svg", ra.svg, "also write SVG plots");

    std::string problem_path;
    CLI::App* solve = app.add_subcommand("solve", "Minimize one problem given as dense text");
    solve->add_option("file", problem_path, "n, Q rows, phi, lambda")->required();

    std::string check_dir;
    CLI::App* check = app.add_subcommand("check", "Validate an output directory");
    check->add_option("dir", check_dir, "directory written by run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run) return do_run(ra, *run);
        if (*solve) return do_solve(problem_path);
        if (*check) return do_check(check_dir);
    } catch (const stvo::NumericalError& e) {
        std::cerr << "stvo: numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "stvo: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "stvo: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}
