#include "stvo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stvo {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what)
{
    if (a != b) throw InvalidInput(std::string(what) + ": sequences differ in length");
}

}  // namespace

bool RunTrace::has_oracle() const
{
    return !rounds.empty() && std::all_of(rounds.begin(), rounds.end(),
                                          [](const RoundRecord& r) { return r.x_star.size() > 0; });
}

bool RunTrace::has_dr_state() const
{
    return !rounds.empty() && std::all_of(rounds.begin(), rounds.end(), [](const RoundRecord& r) {
        return r.z.size() > 0 && r.z_star.size() > 0;
    });
}

RegretSeries dynamic_regret(std::span<const double> loss, std::span<const double> oracle_loss)
{
    require_same_length(loss.size(), oracle_loss.size(), "dynamic_regret");
    if (loss.empty()) throw InvalidInput("dynamic_regret: empty trace");
    RegretSeries out;
    out.reg.reserve(loss.size());
    out.reg_over_t.reserve(loss.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < loss.size(); ++t) {
        acc += loss[t] - oracle_loss[t];
        out.reg.push_back(acc);
        out.reg_over_t.push_back(acc / static_cast<double>(t + 1));
    }
    return out;
}

RegretSeries dynamic_regret(const RunTrace& trace)
{
    std::vector<double> loss, oracle;
    loss.reserve(trace.rounds.size());
    oracle.reserve(trace.rounds.size());
    for (const auto& r : trace.rounds) {
        loss.push_back(r.loss);
        oracle.push_back(r.oracle_loss);
    }
    return dynamic_regret(loss, oracle);
}

double path_length(std::span<const Vector> points, bool squared)
{
    if (points.size() < 2) throw InvalidInput("path_length: need at least two points");
    double acc = 0.0;
    for (std::size_t t = 1; t < points.size(); ++t) {
        detail::require_dim(points[t].size(), points[0].size(), "path_length point");
        const double d = (points[t] - points[t - 1]).norm();
        acc += squared ? d * d : d;
    }
    return acc;
}

OracleSteps oracle_steps(const RunTrace& trace)
{
    if (!trace.has_oracle()) throw InvalidInput("oracle_steps: trace has no oracle");
    const bool with_z = std::all_of(trace.rounds.begin(), trace.rounds.end(),
                                    [](const RoundRecord& r) { return r.z_star.size() > 0; });
    OracleSteps out;
    const Eigen::Index n = trace.rounds.front().x_star.size();
    Vector prev_x = Vector::Zero(n);
    Vector prev_z = Vector::Zero(n);
    for (const auto& r : trace.rounds) {
        out.dx.push_back((r.x_star - prev_x).norm());
        prev_x = r.x_star;
        if (with_z) {
            out.dz.push_back((r.z_star - prev_z).norm());
            prev_z = r.z_star;
        }
    }
    return out;
}

namespace {

struct RunMaxima {
    double M_Q = 0, M_phi = 0, M_star = 0, delta = 0, q = 0, lambda = 0;
    Eigen::Index n = 0;
};

RunMaxima run_maxima(std::span<const QuadraticL1Problem> problems, const RunTrace& trace)
{
    require_same_length(problems.size(), trace.rounds.size(), "bound constants");
    if (problems.empty()) throw InvalidInput("bound constants: empty run");
    RunMaxima m;
    m.n = problems.front().dim();
    m.lambda = problems.front().lambda();
    for (std::size_t t = 0; t < problems.size(); ++t) {
        const auto& p = problems[t];
        const auto& rec = trace.rounds[t];
        const ContractionConstants cc = contraction_constants(p);
        m.M_Q = std::max(m.M_Q, p.max_eigenvalue());
        m.M_phi = std::max(m.M_phi, p.phi().norm());
        m.M_star = std::max({m.M_star, rec.x_star.norm(), rec.z_star.norm()});
        m.delta = std::max(m.delta, cc.delta);
        m.q = std::max(m.q, cc.q);
        m.lambda = std::max(m.lambda, p.lambda());
    }
    return m;
}

}  // namespace

AssumptionCheck check_bounded_run(std::span<const QuadraticL1Problem> problems,
                                  const RunTrace& trace, int r)
{
    if (problems.size() != trace.rounds.size() || problems.empty())
        return {false, "trace and problem stream differ in length"};
    if (!trace.has_oracle() || !trace.has_dr_state())
        return {false, "trace lacks oracle minimizers or DR states"};
    if (r < 1) return {false, "r must be positive"};
    for (const auto& rec : trace.rounds) {
        if (rec.loss < rec.oracle_loss - 1e-9)
            return {false, "round " + std::to_string(rec.t) + " beats its oracle"};
    }
    const RunMaxima m = run_maxima(problems, trace);
    if (!std::isfinite(m.M_Q) || !std::isfinite(m.M_phi) || !std::isfinite(m.M_star))
        return {false, "unbounded data or minimizers"};
    if (!(std::pow(m.delta, r) < 1.0)) return {false, "delta^r >= 1"};
    return {true, {}};
}

BoundConstants theorem1_constants(double M_Q, double M_phi, double M_star, double lambda,
                                  Eigen::Index n, double delta, double q, int r, double dz0,
                                  double dzT)
{
    if (r < 1) throw InvalidParameter("theorem1_constants: r must be positive");
    const double dr = std::pow(delta, r);
    if (!(dr < 1.0)) throw BoundInapplicable("theorem1_constants: delta^r >= 1");
    BoundConstants b;
    b.M_Q = M_Q;
    b.M_phi = M_phi;
    b.M_star = M_star;
    b.lambda = lambda;
    b.n = n;
    b.delta = delta;
    b.q = q;
    b.r = r;
    b.dz0 = dz0;
    b.dzT = dzT;

    b.alpha1 = M_Q * M_star + M_phi + lambda * std::sqrt(static_cast<double>(n));
    b.alpha2 = M_Q / 2.0;
    const double qr = std::pow(q, r);
    b.zeta1 = b.alpha1 * qr;
    b.zeta2 = 2.0 * b.alpha2 * qr * qr;
    b.zeta3 = b.alpha1;
    b.zeta4 = 2.0 * b.alpha2;

    const double d1 = dz0 - dzT;
    const double d2 = dz0 * dz0 - dzT * dzT;
    const double dr2 = dr * dr;
    b.c1 = dr / (1.0 - dr) * d1;
    b.c2 = 1.0 / (1.0 - dr);
    b.c3 = (dr2 * d2 + 4.0 * M_star * dr * d1 + 4.0 * M_star * dr * b.c1) / (1.0 - dr2);
    b.c4 = 4.0 * M_star * dr * b.c2 / (1.0 - dr2);
    b.c5 = 1.0 / (1.0 - dr2);
    b.kappa = b.zeta1 * d1 + b.zeta2 * d2;

    b.eta0 = b.zeta1 * b.c1 + b.zeta2 * b.c3 + b.kappa;
    b.eta1 = b.zeta1 * b.c2 + b.zeta2 * b.c4;
    b.eta2 = b.zeta2 * b.c5;
    b.eta3 = b.zeta3;
    b.eta4 = b.zeta4;
    return b;
}

BoundConstants theorem1_constants(std::span<const QuadraticL1Problem> problems,
                                  const RunTrace& trace, int r)
{
    if (!trace.has_oracle() || !trace.has_dr_state())
        throw BoundInapplicable("theorem1_constants: trace lacks oracle minimizers or DR states");
    const RunMaxima m = run_maxima(problems, trace);
    const double dz0 = trace.rounds.front().z.norm();
    const auto& last = trace.rounds.back();
    const double dzT = (last.z - last.z_star).norm();
    return theorem1_constants(m.M_Q, m.M_phi, m.M_star, m.lambda, m.n, m.delta, m.q, r, dz0, dzT);
}

double theorem1_bound(const OracleSteps& steps, const BoundConstants& b)
{
    require_same_length(steps.dz.size(), steps.dx.size(), "theorem1_bound");
    if (!(std::pow(b.delta, b.r) < 1.0)) throw BoundInapplicable("theorem1_bound: delta^r >= 1");
    double acc = b.eta0;
    for (std::size_t t = 0; t < steps.dz.size(); ++t) {
        const double dz = steps.dz[t];
        const double dx = steps.dx[t];
        acc += b.eta1 * dz + b.eta2 * dz * dz + b.eta3 * dx + b.eta4 * dx * dx;
    }
    return acc;
}

double theorem1_bound(const RunTrace& trace, const BoundConstants& b)
{
    if (!trace.has_dr_state())
        throw BoundInapplicable("theorem1_bound: trace lacks DR fixed points");
    return theorem1_bound(oracle_steps(trace), b);
}

std::vector<double> identification_mse_terms(std::span<const Vector> estimates,
                                             std::span<const Vector> truth, int P, int Q)
{
    require_same_length(estimates.size(), truth.size(), "identification_mse");
    if (P + Q <= 0) throw InvalidParameter("identification_mse: P + Q must be positive");
    std::vector<double> out;
    out.reserve(estimates.size());
    for (std::size_t s = 0; s < estimates.size(); ++s) {
        detail::require_dim(estimates[s].size(), truth[s].size(), "identification_mse estimate");
        out.push_back((truth[s] - estimates[s]).squaredNorm() / (P + Q));
    }
    return out;
}

double identification_mse(std::span<const Vector> estimates, std::span<const Vector> truth, int P,
                          int Q)
{
    const auto terms = identification_mse_terms(estimates, truth, P, Q);
    double acc = 0.0;
    for (double v : terms) acc += v;
    return acc;
}

TrackingDistances tracking_distances(std::span<const Vector> estimates,
                                     std::span<const Vector> truth)
{
    require_same_length(estimates.size(), truth.size(), "tracking_distances");
    TrackingDistances out;
    double acc = 0.0;
    for (std::size_t t = 0; t < estimates.size(); ++t) {
        detail::require_dim(estimates[t].size(), truth[t].size(), "tracking_distances estimate");
        const double d = (estimates[t] - truth[t]).norm();
        acc += d;
        out.instantaneous.push_back(d);
        out.cumulative.push_back(acc);
    }
    return out;
}

RegretTrend regret_trend(std::span<const double> reg, std::span<const double> path_step,
                         std::span<const double> path_step_sq)
{
    require_same_length(reg.size(), path_step.size(), "regret_trend");
    require_same_length(reg.size(), path_step_sq.size(), "regret_trend");
    const auto T = static_cast<Eigen::Index>(reg.size());
    if (T < 4) throw InvalidInput("regret_trend: need at least four rounds");

    Matrix D(T, 3);
    Vector y(T);
    double s1 = 0.0, s2 = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
        s1 += path_step[t];
        s2 += path_step_sq[t];
        D(t, 0) = 1.0;
        D(t, 1) = s1;
        D(t, 2) = s2;
        y(t) = reg[t];
    }
    const Vector beta = D.colPivHouseholderQr().solve(y);
    RegretTrend out;
    out.b0 = beta(0);
    out.b1 = beta(1);
    out.b2 = beta(2);
    const double ss_res = (D * beta - y).squaredNorm();
    const double ss_tot = (y.array() - y.mean()).square().sum();
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    const Eigen::Index half = T / 2;
    out.sublinear = reg[T - 1] / static_cast<double>(T) < reg[half - 1] / static_cast<double>(half);
    return out;
}

}  // namespace stvo
