#include "stvo/runner.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace stvo {

std::string to_string(Algorithm a)
{
    switch (a) {
        case Algorithm::oist:
            return "oist";
        case Algorithm::odr:
            return "odr";
        case Algorithm::odista:
            return "odista";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name)
{
    if (name == "oist") return Algorithm::oist;
    if (name == "odr") return Algorithm::odr;
    if (name == "odista") return Algorithm::odista;
    throw InvalidInput("unknown algorithm '" + std::string(name) + "'");
}

const Matrix& OnlineStream::dictionary(int t) const
{
    if (t < 0 || t >= rounds()) throw InvalidInput("OnlineStream: round out of range");
    return constant_dictionary() ? dictionaries.front() : dictionaries[static_cast<std::size_t>(t)];
}

ElasticNetData OnlineStream::block(int t) const
{
    return {dictionary(t), measurements[static_cast<std::size_t>(t)], lambda, mu};
}

void OnlineStream::validate() const
{
    if (measurements.empty()) throw InvalidInput("OnlineStream: no rounds");
    if (!constant_dictionary() && dictionaries.size() != measurements.size()) {
        throw InvalidInput("OnlineStream: one dictionary per round or a single shared one");
    }
    if (!x_true.empty() && x_true.size() != measurements.size()) {
        throw InvalidInput("OnlineStream: truth and measurements differ in length");
    }
    if (!(lambda > 0.0) || !(mu > 0.0)) {
        throw InvalidParameter("OnlineStream: lambda and mu must be positive");
    }
    const Eigen::Index n = dictionaries.front().cols();
    for (int t = 0; t < rounds(); ++t) {
        detail::require_dim(dictionary(t).cols(), n, "OnlineStream dictionary");
        detail::require_dim(measurements[static_cast<std::size_t>(t)].size(), dictionary(t).rows(),
                            "OnlineStream measurement");
    }
    if (graph.size() > dictionaries.front().rows()) {
        throw InvalidInput("OnlineStream: more nodes than measurement rows");
    }
}

namespace {

template <class Stream>
OnlineStream from_blocks(const Stream& s, Graph graph)
{
    if (s.blocks.empty()) throw InvalidInput("online_stream: no blocks");
    OnlineStream out;
    out.lambda = s.blocks.front().lambda;
    out.mu = s.blocks.front().mu;
    for (const auto& b : s.blocks) {
        out.dictionaries.push_back(b.A);
        out.measurements.push_back(b.y);
    }
    out.x_true = s.x_true;
    out.graph = std::move(graph);
    out.validate();
    return out;
}

}  // namespace

OnlineStream online_stream(const TvarxStream& s, Graph graph)
{
    return from_blocks(s, std::move(graph));
}

OnlineStream online_stream(const SyntheticStream& s, Graph graph)
{
    return from_blocks(s, std::move(graph));
}

Graph tvarx_network()
{
    return ring_graph(4, 3);
}

RssRun rss_run(const RssModel& model, const RssConfig& cfg, std::uint64_t run)
{
    cfg.validate();
    RssRun out;
    out.cells = target_walk(cfg, cfg.path_length_steps, run);
    const std::uint64_t noise_seed = substream(cfg.seed, RngStream::noise, run)();
    auto& s = out.stream;
    s.dictionaries.push_back(model.A);
    s.lambda = cfg.lambda;
    s.mu = cfg.mu;
    for (std::size_t t = 0; t < out.cells.size(); ++t) {
        const int cell = out.cells[t];
        const Vector y =
            rss_measure(model.raw, cell_indicator(cfg, cell), cfg.snr_db, noise_seed, t);
        s.measurements.push_back(model.measurement(y));
        s.x_true.push_back(model.working_truth(cell));
    }
    s.graph = radius_graph(rss_sensor_positions(cfg), cfg.comm_radius_m);
    s.validate();
    return out;
}

std::vector<QuadraticL1Problem> centralized_problems(const OnlineStream& stream)
{
    stream.validate();
    std::vector<QuadraticL1Problem> out;
    out.reserve(static_cast<std::size_t>(stream.rounds()));
    for (int t = 0; t < stream.rounds(); ++t) {
        if (stream.constant_dictionary() && t > 0) {
            const Matrix& A = stream.dictionary(t);
            out.push_back(out.front().with_phi(
                -(A.transpose() * stream.measurements[static_cast<std::size_t>(t)])));
        } else {
            out.push_back(elastic_net_problem(stream.block(t)));
        }
    }
    return out;
}

void RunnerConfig::validate() const
{
    if (r < 1) throw InvalidParameter("RunnerConfig: r must be >= 1");
    if (!(ist_tau_scale > 0.0) || !(dista_tau_scale > 0.0)) {
        throw InvalidParameter("RunnerConfig: tau scales must be positive");
    }
}

namespace {

// ||A_t||^2 from the cached spectrum of A'A + mu I.
double data_norm_sq(const QuadraticL1Problem& p, double mu)
{
    return p.max_eigenvalue() - mu;
}

class Engine {
 public:
    Engine(const OnlineStream& stream, const RunnerConfig& cfg)
        : stream_(stream), cfg_(cfg), n_(stream.dictionaries.front().cols())
    {
        dr_ = DRState::zeros(n_);
        x_ = Vector::Zero(n_);
        if (cfg.algorithm == Algorithm::odista) {
            net_ = NetworkState::zeros(n_, stream.graph.size());
        }
    }

    Vector played() const
    {
        switch (cfg_.algorithm) {
            case Algorithm::odr:
                return dr_.x;
            case Algorithm::oist:
                return x_;
            case Algorithm::odista:
                return network_mean(net_.X);
        }
        return x_;
    }

    const Vector& played_z() const { return dr_.z; }

    void step(int t, const QuadraticL1Problem& problem, int r)
    {
        switch (cfg_.algorithm) {
            case Algorithm::odr: {
                OnlineConfig oc;
                oc.r = r;
                dr_ = odr_round(dr_, problem, oc);
                break;
            }
            case Algorithm::oist: {
                OnlineConfig oc;
                oc.r = r;
                oc.tau_rule = TauRule::scaled_spectral;
                oc.tau_scale = cfg_.ist_tau_scale;
                const OnlineConfig resolved = oc.resolved(data_norm_sq(problem, stream_.mu));
                IstDiagnostics diag;
                x_ = oist_round(x_, problem, resolved, &diag);
                unsafe_ += diag.unsafe_steps;
                break;
            }
            case Algorithm::odista: {
                const DistributedBlock block = split_rows(stream_.block(t), stream_.graph.size());
                const std::vector<double> tau =
                    cfg_.dista_common_tau ? common_safe_tau(block.nodes)
                                          : per_node_tau(block.nodes, cfg_.dista_tau_scale);
                net_ = odista_round(net_, stream_.graph, block.nodes, block.lambda_node, tau, r);
                break;
            }
        }
    }

    int unsafe_steps() const { return unsafe_; }
    const NetworkState& network() const { return net_; }

 private:
    const OnlineStream& stream_;
    RunnerConfig cfg_;
    Eigen::Index n_;
    DRState dr_;
    Vector x_;
    NetworkState net_;
    int unsafe_ = 0;
};

}  // namespace

RunOutput run_online(const OnlineStream& stream, std::span<const QuadraticL1Problem> problems,
                     const RunnerConfig& cfg)
{
    cfg.validate();
    stream.validate();
    if (problems.size() != static_cast<std::size_t>(stream.rounds())) {
        throw InvalidInput("run_online: one problem per round required");
    }
    RunOutput out;
    out.trace.algorithm = to_string(cfg.algorithm);
    Engine engine(stream, cfg);
    for (int t = 0; t < stream.rounds(); ++t) {
        const QuadraticL1Problem& problem = problems[static_cast<std::size_t>(t)];
        RoundRecord rec;
        rec.t = t + 1;
        rec.x = engine.played();
        if (cfg.algorithm == Algorithm::odr) rec.z = engine.played_z();
        rec.loss = objective_value(rec.x, problem);
        if (cfg.oracle) {
            const OracleSolution oracle = oracle_minimizer(problem);
            rec.x_star = oracle.x_star;
            rec.z_star = oracle.z_star;
            rec.oracle_loss = objective_value(oracle.x_star, problem);
        } else {
            rec.oracle_loss = std::numeric_limits<double>::quiet_NaN();
        }
        engine.step(t, problem, cfg.r);
        rec.x_next = engine.played();
        if (!rec.x_next.allFinite()) {
            throw NumericalError("run_online: " + to_string(cfg.algorithm) +
                                 " estimate is not finite at round " + std::to_string(t + 1));
        }
        if (cfg.algorithm == Algorithm::odista) {
            out.disagreement.push_back(max_pairwise_disagreement(engine.network().X));
        }
        out.trace.rounds.push_back(std::move(rec));
    }
    out.ist_unsafe_steps = engine.unsafe_steps();
    return out;
}

RunOutput run_online(const OnlineStream& stream, const RunnerConfig& cfg)
{
    const auto problems = centralized_problems(stream);
    return run_online(stream, problems, cfg);
}

int calibrate_r(const OnlineStream& stream, const RunnerConfig& cfg, double budget_ms, int cap)
{
    if (!(budget_ms > 0.0)) throw InvalidParameter("calibrate_r: budget must be positive");
    if (cap < 1) throw InvalidParameter("calibrate_r: cap must be >= 1");
    stream.validate();
    using clock = std::chrono::steady_clock;
    const QuadraticL1Problem problem = elastic_net_problem(stream.block(0));
    RunnerConfig probe = cfg;
    probe.oracle = false;
    Engine engine(stream, probe);

    const int batch = 64;
    long iterations = 0;
    const auto start = clock::now();
    double elapsed_ms = 0.0;
    while (elapsed_ms < 20.0) {
        engine.step(0, problem, batch);
        iterations += batch;
        elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    }
    double per_iteration = elapsed_ms / static_cast<double>(iterations);
    if (cfg.algorithm == Algorithm::odista) per_iteration /= stream.graph.size();
    const double r = std::floor(budget_ms / per_iteration);
    if (!(r >= 1.0)) return 1;
    return r >= cap ? cap : static_cast<int>(r);
}

}  // namespace stvo
