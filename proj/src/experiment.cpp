#include "stvo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "stvo/output.hpp"

namespace stvo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kTraceHeader = {"t",        "loss", "oracle_loss", "err_oracle",
                                               "err_true", "nnz",  "disagreement"};
const std::vector<std::string> kRegretHeader = {"t", "reg", "reg_over_t"};
const std::vector<std::string> kParamsHeader = {"t",       "a1_true", "a1_est",
                                                "b1_true", "b1_est",  "mse"};
const std::vector<std::string> kDistanceHeader = {"t", "dist", "cum_dist"};
const std::vector<std::string> kSummaryHeader = {"algorithm", "metric", "value"};

}  // namespace

std::string to_string(Scenario s)
{
    switch (s) {
        case Scenario::exp1:
            return "exp1";
        case Scenario::exp2:
            return "exp2";
        case Scenario::rss:
            return "rss";
        case Scenario::synthetic:
            return "synthetic";
    }
    return "?";
}

Scenario parse_scenario(std::string_view name)
{
    if (name == "exp1") return Scenario::exp1;
    if (name == "exp2") return Scenario::exp2;
    if (name == "rss") return Scenario::rss;
    if (name == "synthetic") return Scenario::synthetic;
    throw InvalidInput("unknown scenario '" + std::string(name) + "'");
}

int default_runs(Scenario s)
{
    switch (s) {
        case Scenario::exp1:
        case Scenario::exp2:
            return 200;
        case Scenario::rss:
            return 10;
        case Scenario::synthetic:
            return 20;
    }
    return 1;
}

void RunSpec::validate() const
{
    if (runs < 0) throw InvalidParameter("RunSpec: runs must be >= 1");
    if (algorithms.empty()) throw InvalidParameter("RunSpec: no algorithm selected");
    std::set<Algorithm> unique(algorithms.begin(), algorithms.end());
    if (unique.size() != algorithms.size()) throw InvalidParameter("RunSpec: duplicate algorithm");
    if (r && *r < 1) throw InvalidParameter("RunSpec: r must be >= 1");
    if (tr_ms && !(*tr_ms > 0.0)) throw InvalidParameter("RunSpec: t_r must be positive");
    if (r_cap < 1) throw InvalidParameter("RunSpec: r cap must be >= 1");
    if (out.empty()) throw InvalidParameter("RunSpec: empty output directory");
}

namespace {

struct Instance {
    OnlineStream stream;
    std::vector<double> block_end_s;  // TVARX
    std::vector<int> cells;           // RSS
};

// Scenario configuration with the seed of one algorithm applied.
class Source {
 public:
    Source(Scenario scenario, const ConfigMap& config, std::optional<std::uint64_t> seed)
        : scenario_(scenario)
    {
        std::set<std::string> used;
        switch (scenario) {
            case Scenario::exp1:
            case Scenario::exp2: {
                const Experiment want =
                    scenario == Scenario::exp1 ? Experiment::exp1 : Experiment::exp2;
                apply_config(tvarx_, config, used);
                if (config.count("experiment") && tvarx_.experiment != want) {
                    throw InvalidInput("config: experiment contradicts --scenario");
                }
                tvarx_.experiment = want;
                if (seed) tvarx_.seed = *seed;
                tvarx_.validate();
                break;
            }
            case Scenario::rss:
                apply_config(rss_, config, used);
                if (seed) rss_.seed = *seed;
                rss_.validate();
                break;
            case Scenario::synthetic:
                apply_config(synthetic_, config, used);
                if (seed) synthetic_.seed = *seed;
                synthetic_.validate();
                break;
        }
        for (const auto& [key, value] : config) {
            if (!used.count(key)) {
                throw InvalidInput("config: unknown key '" + key + "' for scenario " +
                                   to_string(scenario));
            }
        }
    }

    std::uint64_t seed() const
    {
        switch (scenario_) {
            case Scenario::rss:
                return rss_.seed;
            case Scenario::synthetic:
                return synthetic_.seed;
            default:
                return tvarx_.seed;
        }
    }

    void set_seed(std::uint64_t seed)
    {
        tvarx_.seed = rss_.seed = synthetic_.seed = seed;
        model_.reset();
    }

    void prepare()
    {
        if (scenario_ == Scenario::rss && !model_) model_ = rss_model(rss_);
    }

    Instance make(std::uint64_t run) const
    {
        Instance out;
        switch (scenario_) {
            case Scenario::exp1:
            case Scenario::exp2: {
                TvarxStream s = tvarx_stream(tvarx_, run);
                out.block_end_s = s.block_end_s;
                out.stream = online_stream(s, tvarx_network());
                break;
            }
            case Scenario::rss: {
                RssRun rr = rss_run(*model_, rss_, run);
                out.stream = std::move(rr.stream);
                out.cells = std::move(rr.cells);
                break;
            }
            case Scenario::synthetic:
                out.stream = online_stream(synthetic_stream(synthetic_, run), ring_graph(4, 3));
                break;
        }
        return out;
    }

    bool tvarx() const { return scenario_ == Scenario::exp1 || scenario_ == Scenario::exp2; }
    bool rss() const { return scenario_ == Scenario::rss; }
    bool oracle() const { return !rss(); }

    // One block of samples, or one RSS round.
    double default_tr_ms() const
    {
        if (rss()) return rss_.round_ms;
        if (tvarx()) return 1000.0 * tvarx_.m / tvarx_.sample_rate_hz;
        return 1.0;
    }

    const TvarxConfig& tvarx_config() const { return tvarx_; }
    const RssConfig& rss_config() const { return rss_; }

 private:
    Scenario scenario_;
    TvarxConfig tvarx_;
    RssConfig rss_;
    SyntheticConfig synthetic_;
    std::optional<RssModel> model_;
};

struct RunResult {
    CsvTable trace;
    std::vector<double> reg;
    std::vector<double> a1_true, a1_est, b1_true, b1_est, mse;
    std::vector<double> dist;
    double bound = kNaN;
    bool bound_conforming = false;
    std::optional<RegretTrend> trend;
    int unsafe_steps = 0;
    double final_disagreement = kNaN;
    double mse_total = kNaN;
};

double cell_distance(const RssConfig& cfg, int a, int b)
{
    const Point2 p = cell_center(cfg, a), q = cell_center(cfg, b);
    return std::hypot(p.x - q.x, p.y - q.y);
}

RunResult execute_run(const Source& source, const Instance& inst, const RunnerConfig& rc)
{
    const auto problems = centralized_problems(inst.stream);
    RunOutput out = run_online(inst.stream, problems, rc);
    const auto& rounds = out.trace.rounds;
    const auto T = rounds.size();

    RunResult res;
    res.unsafe_steps = out.ist_unsafe_steps;
    if (!out.disagreement.empty()) res.final_disagreement = out.disagreement.back();
    if (rc.oracle) res.reg = dynamic_regret(out.trace).reg;

    res.trace.header = kTraceHeader;
    std::vector<Vector> played;
    played.reserve(T);
    for (std::size_t i = 0; i < T; ++i) {
        const RoundRecord& rec = rounds[i];
        played.push_back(rec.x);
        const double err_oracle = rc.oracle ? (rec.x - rec.x_star).norm() : kNaN;
        const double err_true =
            inst.stream.x_true.empty() ? kNaN : (rec.x - inst.stream.x_true[i]).norm();
        const auto nnz = static_cast<double>((rec.x.array() != 0.0).count());
        const double dis = out.disagreement.empty() ? kNaN : out.disagreement[i];
        res.trace.add_row(std::vector<double>{static_cast<double>(rec.t), rec.loss, rec.oracle_loss,
                                              err_oracle, err_true, nnz, dis});
    }

    if (source.tvarx()) {
        const int P = source.tvarx_config().P_hat, Q = source.tvarx_config().Q_hat;
        res.mse = identification_mse_terms(played, inst.stream.x_true, P, Q);
        res.mse_total = 0.0;
        for (double m : res.mse) res.mse_total += m;
        for (std::size_t i = 0; i < T; ++i) {
            res.a1_true.push_back(inst.stream.x_true[i](0));
            res.a1_est.push_back(played[i](0));
            res.b1_true.push_back(inst.stream.x_true[i](P));
            res.b1_est.push_back(played[i](P));
        }
    }
    if (source.rss()) {
        for (std::size_t i = 0; i < T; ++i) {
            res.dist.push_back(
                cell_distance(source.rss_config(), snap_to_cell(played[i]), inst.cells[i]));
        }
    }
    if (rc.algorithm == Algorithm::odr && rc.oracle) {
        const AssumptionCheck check = check_bounded_run(problems, out.trace, rc.r);
        if (check.holds) {
            try {
                const BoundConstants b = theorem1_constants(problems, out.trace, rc.r);
                res.bound = theorem1_bound(out.trace, b);
                res.bound_conforming = std::isfinite(res.bound);
            } catch (const BoundInapplicable&) {
                res.bound_conforming = false;
            }
        }
    }
    if (rc.algorithm == Algorithm::odista && rc.oracle && T >= 4) {
        const OracleSteps steps = oracle_steps(out.trace);
        std::vector<double> sq;
        for (double d : steps.dx) sq.push_back(d * d);
        res.trend = regret_trend(res.reg, steps.dx, sq);
    }
    return res;
}

// Runs every Monte-Carlo realization; the first failure by run index wins.
std::vector<RunResult> execute_runs(const Source& source, const RunnerConfig& rc, int runs)
{
    std::vector<RunResult> results(static_cast<std::size_t>(runs));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(runs));
#pragma omp parallel for schedule(dynamic, 1)
    for (int run = 0; run < runs; ++run) {
        const auto k = static_cast<std::size_t>(run);
        try {
            const Instance inst = source.make(static_cast<std::uint64_t>(run));
            results[k] = execute_run(source, inst, rc);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

std::vector<double> mean_over_runs(const std::vector<RunResult>& results,
                                   std::vector<double> RunResult::* field)
{
    std::vector<double> acc((results.front().*field).size(), 0.0);
    for (const auto& r : results) {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += (r.*field)[i];
    }
    for (double& v : acc) v /= static_cast<double>(results.size());
    return acc;
}

double median(std::vector<double> v)
{
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct PendingFile {
    std::filesystem::path name;
    CsvTable table;
};

struct PendingPlot {
    std::filesystem::path name;
    std::string title;
    std::vector<double> x;
    std::vector<PlotSeries> series;
};

struct AlgorithmOutput {
    std::vector<PendingFile> csv;
    std::vector<PendingPlot> svg;
    std::vector<MetricRow> summary;
};

std::vector<double> round_axis(std::size_t T)
{
    std::vector<double> t(T);
    for (std::size_t i = 0; i < T; ++i) t[i] = static_cast<double>(i + 1);
    return t;
}

AlgorithmOutput aggregate(const Source& source, Algorithm alg, int r,
                          const std::vector<RunResult>& results, const Instance& first)
{
    AlgorithmOutput out;
    const std::string name = to_string(alg);
    const std::size_t T = results.front().trace.rows.size();
    const auto runs = static_cast<double>(results.size());
    auto metric = [&](const std::string& m, double v) { out.summary.push_back({name, m, v}); };

    for (std::size_t k = 0; k < results.size(); ++k) {
        out.csv.push_back({"trace_" + name + "_" + std::to_string(k) + ".csv", results[k].trace});
    }
    metric("runs", runs);
    metric("r", r);

    if (source.oracle()) {
        const auto reg = mean_over_runs(results, &RunResult::reg);
        CsvTable table{kRegretHeader, {}};
        std::vector<double> reg_over_t(T);
        for (std::size_t i = 0; i < T; ++i) {
            reg_over_t[i] = reg[i] / static_cast<double>(i + 1);
            table.add_row(std::vector<double>{static_cast<double>(i + 1), reg[i], reg_over_t[i]});
        }
        out.csv.push_back({"regret_" + name + ".csv", std::move(table)});
        out.svg.push_back({"regret_" + name + ".svg",
                           "Reg_t / t, " + name,
                           round_axis(T),
                           {{"reg_over_t", reg_over_t}}});
        metric("regret_final_mean", reg.back());
        metric("regret_over_T_final_mean", reg_over_t.back());
    }

    if (alg == Algorithm::odr && source.oracle()) {
        int conforming = 0, violations = 0;
        double bound_sum = 0.0, bound_min = HUGE_VAL, ratio_max = 0.0;
        for (const auto& res : results) {
            if (!res.bound_conforming) continue;
            ++conforming;
            bound_sum += res.bound;
            bound_min = std::min(bound_min, res.bound);
            ratio_max = std::max(ratio_max, res.reg.back() / res.bound);
            if (res.reg.back() > res.bound) ++violations;
        }
        metric("bound_runs_conforming", conforming);
        metric("bound_runs_excluded", static_cast<double>(results.size()) - conforming);
        metric("bound_mean", conforming ? bound_sum / conforming : kNaN);
        metric("bound_min", conforming ? bound_min : kNaN);
        metric("bound_violations", violations);
        metric("regret_over_bound_max", conforming ? ratio_max : kNaN);
    }

    if (alg == Algorithm::odista) {
        double dis = 0.0;
        for (const auto& res : results) dis += res.final_disagreement;
        metric("disagreement_final_mean", dis / runs);
        if (results.front().trend) {
            double b0 = 0, b1 = 0, b2 = 0, r2 = 0, sub = 0;
            for (const auto& res : results) {
                b0 += res.trend->b0;
                b1 += res.trend->b1;
                b2 += res.trend->b2;
                r2 += res.trend->r_squared;
                sub += res.trend->sublinear ? 1.0 : 0.0;
            }
            metric("trend_b0_mean", b0 / runs);
            metric("trend_b1_mean", b1 / runs);
            metric("trend_b2_mean", b2 / runs);
            metric("trend_r_squared_mean", r2 / runs);
            metric("trend_sublinear_fraction", sub / runs);
        }
    }

    if (alg == Algorithm::oist) {
        int unsafe = 0;
        for (const auto& res : results) unsafe += res.unsafe_steps;
        metric("ist_unsafe_steps", unsafe);
    }

    if (source.tvarx()) {
        const auto a1_true = mean_over_runs(results, &RunResult::a1_true);
        const auto a1_est = mean_over_runs(results, &RunResult::a1_est);
        const auto b1_true = mean_over_runs(results, &RunResult::b1_true);
        const auto b1_est = mean_over_runs(results, &RunResult::b1_est);
        const auto mse = mean_over_runs(results, &RunResult::mse);
        CsvTable table{kParamsHeader, {}};
        for (std::size_t i = 0; i < T; ++i) {
            table.add_row(std::vector<double>{first.block_end_s[i], a1_true[i], a1_est[i],
                                              b1_true[i], b1_est[i], mse[i]});
        }
        out.csv.push_back({"params_" + name + ".csv", std::move(table)});
        out.svg.push_back(
            {"params_" + name + ".svg",
             "a1 and b1, " + name,
             first.block_end_s,
             {{"a1_true", a1_true}, {"a1_est", a1_est}, {"b1_true", b1_true}, {"b1_est", b1_est}}});
        double total = 0.0;
        for (const auto& res : results) total += res.mse_total;
        metric("mse_mean", total / runs);
    }

    if (source.rss()) {
        const auto dist = mean_over_runs(results, &RunResult::dist);
        CsvTable table{kDistanceHeader, {}};
        double cum = 0.0;
        for (std::size_t i = 0; i < T; ++i) {
            cum += dist[i];
            table.add_row(std::vector<double>{static_cast<double>(i + 1), dist[i], cum});
        }
        out.csv.push_back({"distance_" + name + ".csv", std::move(table)});
        out.svg.push_back({"distance_" + name + ".svg",
                           "Distance to target [m], " + name,
                           round_axis(T),
                           {{"dist", dist}}});
        std::vector<double> all;
        int transients = 0;
        for (const auto& res : results) {
            for (double d : res.dist) {
                all.push_back(d);
                if (d > std::sqrt(2.0) + 1e-9) ++transients;
            }
        }
        metric("dist_median", median(all));
        metric("transient_fraction", transients / static_cast<double>(all.size()));
        metric("cum_dist_final_mean", cum);
    }
    return out;
}

}  // namespace

RunReport run_experiment(const RunSpec& spec, std::ostream& log)
{
    spec.validate();
    const int runs = spec.runs > 0 ? spec.runs : default_runs(spec.scenario);
    Source base(spec.scenario, spec.config, spec.seed);
    const std::uint64_t seed = base.seed();

    std::vector<MetricRow> summary;
    std::vector<AlgorithmOutput> outputs;
    for (std::size_t k = 0; k < spec.algorithms.size(); ++k) {
        const Algorithm alg = spec.algorithms[k];
        Source source = base;
        if (!spec.common_random) source.set_seed(substream(seed, RngStream::algorithm, k)());
        source.prepare();

        RunnerConfig rc;
        rc.algorithm = alg;
        rc.oracle = source.oracle();
        const Instance first = source.make(0);
        if (spec.r) {
            rc.r = *spec.r;
        } else {
            const double budget = spec.tr_ms.value_or(source.default_tr_ms());
            rc.r = calibrate_r(first.stream, rc, budget, spec.r_cap);
            log << to_string(alg) << ": r = " << rc.r << " from t_r = " << budget << " ms\n";
        }
        const auto results = execute_runs(source, rc, runs);
        outputs.push_back(aggregate(source, alg, rc.r, results, first));
        for (const auto& row : outputs.back().summary) summary.push_back(row);
    }

    RunReport report;
    report.summary = summary;
    const bool created = !std::filesystem::exists(spec.out);
    try {
        std::filesystem::create_directories(spec.out);
        auto emit = [&](const std::filesystem::path& name, const CsvTable& table) {
            report.files.push_back(spec.out / name);
            table.write(report.files.back());
        };
        for (const auto& o : outputs) {
            for (const auto& f : o.csv) emit(f.name, f.table);
            if (spec.svg) {
                for (const auto& p : o.svg) {
                    report.files.push_back(spec.out / p.name);
                    write_svg_plot(report.files.back(), p.title, "t", p.x, p.series);
                }
            }
        }
        CsvTable table{kSummaryHeader, {}};
        for (const auto& row : summary) {
            table.add_row(
                std::vector<std::string>{row.algorithm, row.metric, format_number(row.value)});
        }
        emit("summary.csv", table);
    } catch (...) {
        std::error_code ec;
        for (const auto& f : report.files) std::filesystem::remove(f, ec);
        if (created) std::filesystem::remove(spec.out, ec);
        throw;
    }
    return report;
}

namespace {

void check_numeric(const CsvTable& t, const std::string& file, std::vector<std::string>& problems)
{
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        for (const auto& field : t.rows[i]) {
            try {
                parse_number(field);
            } catch (const InvalidInput&) {
                problems.push_back(file + ": row " + std::to_string(i + 1) +
                                   ": non-numeric field '" + field + "'");
                return;
            }
        }
    }
}

void check_nondecreasing(const CsvTable& t, const std::string& col, const std::string& file,
                         std::vector<std::string>& problems)
{
    const std::size_t c = column(t, col);
    double prev = -HUGE_VAL;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double v = parse_number(t.rows[i][c]);
        if (v < prev - 1e-9 * std::max(1.0, std::abs(prev))) {
            problems.push_back(file + ": " + col + " decreases at row " + std::to_string(i + 1));
            return;
        }
        prev = v;
    }
}

}  // namespace

CheckReport check_outputs(const std::filesystem::path& dir)
{
    CheckReport report;
    if (!std::filesystem::is_directory(dir)) {
        report.problems.push_back(dir.string() + ": not a directory");
        return report;
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) report.problems.push_back(dir.string() + ": no CSV files");

    for (const auto& path : files) {
        ++report.files;
        const std::string file = path.filename().string();
        auto& problems = report.problems;
        try {
            const CsvTable t = read_csv(path);
            auto expect = [&](const std::vector<std::string>& header) {
                if (t.header != header) {
                    problems.push_back(file + ": unexpected header");
                    return false;
                }
                return true;
            };
            if (file == "summary.csv") {
                if (!expect(kSummaryHeader)) continue;
                for (std::size_t i = 0; i < t.rows.size(); ++i) {
                    try {
                        parse_number(t.rows[i][2]);
                    } catch (const InvalidInput&) {
                        problems.push_back(file + ": row " + std::to_string(i + 1) +
                                           ": non-numeric value");
                    }
                }
                continue;
            }
            if (file.rfind("trace_", 0) == 0) {
                if (!expect(kTraceHeader)) continue;
                check_numeric(t, file, problems);
                const std::size_t L = column(t, "loss"), O = column(t, "oracle_loss");
                for (std::size_t i = 0; i < t.rows.size(); ++i) {
                    const double loss = parse_number(t.rows[i][L]);
                    const double oracle = parse_number(t.rows[i][O]);
                    if (std::isfinite(oracle) &&
                        loss < oracle - 1e-9 * std::max(1.0, std::abs(oracle))) {
                        problems.push_back(file + ": loss below oracle loss at row " +
                                           std::to_string(i + 1));
                        break;
                    }
                }
                check_nondecreasing(t, "t", file, problems);
            } else if (file.rfind("regret_", 0) == 0) {
                if (!expect(kRegretHeader)) continue;
                check_numeric(t, file, problems);
                check_nondecreasing(t, "reg", file, problems);
            } else if (file.rfind("params_", 0) == 0) {
                if (!expect(kParamsHeader)) continue;
                check_numeric(t, file, problems);
            } else if (file.rfind("distance_", 0) == 0) {
                if (!expect(kDistanceHeader)) continue;
                check_numeric(t, file, problems);
                check_nondecreasing(t, "cum_dist", file, problems);
            } else {
                problems.push_back(file + ": unknown output file");
            }
        } catch (const InvalidInput& e) {
            problems.push_back(file + ": " + e.what());
        }
    }
    return report;
}

QuadraticL1Problem read_problem(std::istream& is)
{
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(is, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) tokens.push_back(tok);
    }
    if (tokens.empty()) throw InvalidInput("problem file: empty");
    std::size_t pos = 0;
    auto next = [&](const char* what) {
        if (pos >= tokens.size()) throw InvalidInput(std::string("problem file: missing ") + what);
        const std::string& tok = tokens[pos++];
        const double v = parse_number(tok);
        if (!std::isfinite(v)) throw InvalidInput("problem file: non-finite " + std::string(what));
        return v;
    };
    const double nd = next("dimension");
    if (nd < 1 || nd != std::floor(nd) || nd > 1e5) {
        throw InvalidInput("problem file: dimension must be a positive integer");
    }
    const auto n = static_cast<Eigen::Index>(nd);
    Matrix Q(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) Q(i, j) = next("Q entry");
    }
    Vector phi(n);
    for (Eigen::Index i = 0; i < n; ++i) phi(i) = next("phi entry");
    const double lambda = next("lambda");
    if (pos != tokens.size()) throw InvalidInput("problem file: trailing tokens");
    try {
        return QuadraticL1Problem(std::move(Q), std::move(phi), lambda);
    } catch (const InvalidParameter& e) {
        throw InvalidInput(std::string("problem file: ") + e.what());
    }
}

SolveReport solve_problem(const QuadraticL1Problem& problem)
{
    SolveReport out;
    out.batch = batch_dr(problem, kOracleTolerance, kOracleMaxIter, DRState::zeros(problem.dim()));
    out.residual = optimality_residual(out.batch.x_star, problem);
    return out;
}

}  // namespace stvo
