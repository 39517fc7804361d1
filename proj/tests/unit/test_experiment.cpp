#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stvo/experiment.hpp"
#include "stvo/output.hpp"

using namespace stvo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("stvo_test_" + name))
    {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

RunSpec golden_spec(const fs::path& out)
{
    RunSpec spec;
    spec.scenario = Scenario::synthetic;
    spec.algorithms = {Algorithm::odr, Algorithm::odista};
    spec.runs = 2;
    spec.r = 3;
    spec.seed = 5;
    spec.out = out;
    spec.config = {{"rounds", "8"}};
    return spec;
}

}  // namespace

TEST_CASE("format_number round-trips")
{
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e300) == "1e+300");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-HUGE_VAL) == "-inf");
    for (double v : {1.0 / 3.0, -2.5e-17, 123456789.125, 6.02214076e23}) {
        CHECK(parse_number(format_number(v)) == v);
    }
    CHECK(std::isnan(parse_number("nan")));
    CHECK_THROWS_AS(parse_number("1.5x"), InvalidInput);
    CHECK_THROWS_AS(parse_number(""), InvalidInput);
}

TEST_CASE("CSV tables")
{
    CsvTable t{{"a", "b"}, {}};
    t.add_row(std::vector<double>{1, 0.5});
    CHECK_THROWS_AS(t.add_row(std::vector<double>{1}), InvalidInput);
    std::ostringstream os;
    t.write(os);
    CHECK(os.str() == "a,b\n1,0.5\n");
    std::istringstream is(os.str());
    const CsvTable back = read_csv(is);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(column(back, "b") == 1);
    CHECK_THROWS_AS(column(back, "c"), InvalidInput);

    std::istringstream crlf("a,b\r\n1,2\r\n");
    CHECK_THROWS_AS(read_csv(crlf), InvalidInput);
    std::istringstream ragged("a,b\n1\n");
    CHECK_THROWS_AS(read_csv(ragged), InvalidInput);
}

TEST_CASE("scenario names and defaults")
{
    for (Scenario s : {Scenario::exp1, Scenario::exp2, Scenario::rss, Scenario::synthetic}) {
        CHECK(parse_scenario(to_string(s)) == s);
    }
    CHECK(default_runs(Scenario::exp1) == 200);
    CHECK(default_runs(Scenario::rss) == 10);
    CHECK_THROWS_AS(parse_scenario("exp3"), InvalidInput);

    RunSpec spec;
    spec.algorithms.clear();
    CHECK_THROWS_AS(spec.validate(), InvalidParameter);
    spec.algorithms = {Algorithm::odr, Algorithm::odr};
    CHECK_THROWS_AS(spec.validate(), InvalidParameter);
    spec.algorithms = {Algorithm::odr};
    spec.r = 0;
    CHECK_THROWS_AS(spec.validate(), InvalidParameter);
}

TEST_CASE("run_experiment writes the documented files")
{
    TempDir dir("layout");
    std::ostringstream log;
    const RunReport rep = run_experiment(golden_spec(dir.path), log);
    for (const char* f : {"trace_odr_0.csv", "trace_odr_1.csv", "trace_odista_1.csv",
                          "regret_odr.csv", "regret_odista.csv", "summary.csv"}) {
        CHECK(fs::exists(dir.path / f));
    }
    CHECK(rep.files.size() == 7);
    const CheckReport chk = check_outputs(dir.path);
    CHECK(chk.ok());
    CHECK(chk.files == 7);
    const CsvTable trace = read_csv(dir.path / "trace_odr_0.csv");
    CHECK(trace.rows.size() == 8);
}

TEST_CASE("golden outputs")
{
    TempDir dir("golden");
    std::ostringstream log;
    run_experiment(golden_spec(dir.path), log);
    for (std::string f : {"trace_odr_0.csv", "regret_odr.csv", "trace_odista_1.csv",
                          "regret_odista.csv", "summary.csv"}) {
        CAPTURE(f);
        CHECK(slurp(dir.path / f) == slurp(fs::path(STVO_GOLDEN_DIR) / f));
    }
}

TEST_CASE("identical specs give identical bytes")
{
    TempDir a("det_a"), b("det_b");
    std::ostringstream log;
    RunSpec spec = golden_spec(a.path);
    spec.scenario = Scenario::exp2;
    spec.config.clear();
    spec.algorithms = {Algorithm::odr};
    run_experiment(spec, log);
    spec.out = b.path;
    run_experiment(spec, log);
    for (const auto& e : fs::directory_iterator(a.path)) {
        CHECK(slurp(e.path()) == slurp(b.path / e.path().filename()));
    }
    CHECK(read_csv(a.path / "trace_odr_0.csv").rows.size() == 83);
}

TEST_CASE("seed policy")
{
    TempDir a("common"), b("separate");
    std::ostringstream log;
    RunSpec spec = golden_spec(a.path);
    spec.algorithms = {Algorithm::odr, Algorithm::oist};
    run_experiment(spec, log);
    spec.out = b.path;
    spec.common_random = false;
    run_experiment(spec, log);
    auto err_true = [](const fs::path& p) { return read_csv(p).rows[3][4]; };
    // The first algorithm keeps the base seed only with common random numbers.
    CHECK(slurp(a.path / "trace_odr_0.csv") != slurp(b.path / "trace_odr_0.csv"));
    CHECK(err_true(a.path / "trace_odr_0.csv") != err_true(b.path / "trace_oist_0.csv"));
}

TEST_CASE("failures leave no output behind")
{
    TempDir dir("fail");
    std::ostringstream log;
    RunSpec spec = golden_spec(dir.path);
    spec.config = {{"rounds", "8"}, {"unknown_key", "1"}};
    CHECK_THROWS_AS(run_experiment(spec, log), InvalidInput);
    CHECK_FALSE(fs::exists(dir.path));
    spec.config = {{"rounds", "8"}, {"mu", "1e-300"}};
    CHECK_THROWS_AS(run_experiment(spec, log), NumericalError);
    CHECK_FALSE(fs::exists(dir.path));
}

TEST_CASE("check_outputs flags broken files")
{
    TempDir dir("check");
    std::ostringstream log;
    run_experiment(golden_spec(dir.path), log);
    {
        std::ofstream os(dir.path / "regret_odr.csv", std::ios::binary);
        os << "t,reg,reg_over_t\n1,2,2\n2,1,0.5\n";
    }
    {
        std::ofstream os(dir.path / "trace_odr_1.csv", std::ios::binary);
        os << "t,loss,oracle_loss,err_oracle,err_true,nnz,disagreement\r\n";
    }
    {
        std::ofstream os(dir.path / "trace_odr_0.csv", std::ios::binary);
        os << "t,loss,oracle_loss,err_oracle,err_true,nnz,disagreement\n1,0.5,1,0,0,0,nan\n";
    }
    const CheckReport chk = check_outputs(dir.path);
    CHECK_FALSE(chk.ok());
    CHECK(chk.problems.size() == 3);
    CHECK_FALSE(check_outputs(dir.path / "missing").ok());
}

TEST_CASE("problem files")
{
    std::istringstream scalar("# 1/2 2x^2 - 3x + |x|\n1\n2\n-3\n1\n");
    const QuadraticL1Problem p = read_problem(scalar);
    const SolveReport rep = solve_problem(p);
    CHECK(rep.batch.converged);
    CHECK(rep.batch.x_star[0] == doctest::Approx(1.0));
    CHECK(rep.residual < 1e-10);

    std::istringstream zero("2\n1 0\n0 1\n0 0\n0.5\n");
    CHECK(solve_problem(read_problem(zero)).batch.x_star.norm() == 0.0);

    for (const char* bad : {"", "2\n1 0\n0 1\n0\n", "1\n1\n1\n1\n7\n", "1.5\n1\n1\n1\n",
                            "2\n1 2\n0 1\n0 0\n1\n", "1\n-1\n0\n1\n", "1\n1\nx\n1\n"}) {
        std::istringstream is(bad);
        CAPTURE(bad);
        CHECK_THROWS_AS(read_problem(is), InvalidInput);
    }
}

TEST_CASE("SVG plots")
{
    TempDir dir("svg");
    fs::create_directories(dir.path);
    const fs::path f = dir.path / "p.svg";
    write_svg_plot(f, "a <b>", "t", {1, 2, 3}, {{"s", {1, std::nan(""), 2}}});
    const std::string s = slurp(f);
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("a &lt;b&gt;") != std::string::npos);
    CHECK_THROWS_AS(write_svg_plot(f, "", "t", {1, 2}, {{"s", {1}}}), InvalidInput);
}
