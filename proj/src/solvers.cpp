#include "stvo/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stvo {

void OnlineConfig::validate() const
{
    if (r < 1) throw InvalidParameter("OnlineConfig: r must be >= 1");
    if (tau_rule == TauRule::fixed && !(tau > 0.0)) {
        throw InvalidParameter("OnlineConfig: fixed rule needs tau > 0");
    }
    if (tau_rule == TauRule::scaled_spectral && !(tau_scale > 0.0)) {
        throw InvalidParameter("OnlineConfig: tau_scale must be positive");
    }
}

OnlineConfig OnlineConfig::resolved(double spectral_norm_sq) const
{
    validate();
    OnlineConfig out = *this;
    if (tau_rule == TauRule::scaled_spectral) {
        if (!(spectral_norm_sq > 0.0)) {
            throw InvalidParameter("OnlineConfig: spectral norm must be positive");
        }
        out.tau = tau_scale / spectral_norm_sq;
        out.tau_rule = TauRule::fixed;
    }
    return out;
}

namespace detail {

void dr_step_inplace(DRState& s, const QuadraticL1Problem& problem, Vector& u)
{
    u = 2.0 * s.x - s.z;
    soft_threshold_inplace(u, problem.lambda());
    s.z += 2.0 * (u - s.x);
    s.x = s.z - problem.phi();
    problem.solve_shifted_inplace(s.x);
}

}  // namespace detail

namespace {

void check_state(const DRState& s, const QuadraticL1Problem& problem)
{
    detail::require_dim(s.x.size(), problem.dim(), "DRState x");
    detail::require_dim(s.z.size(), problem.dim(), "DRState z");
}

}  // namespace

DRState dr_step(const DRState& state, const QuadraticL1Problem& problem)
{
    check_state(state, problem);
    DRState next = state;
    Vector u;
    detail::dr_step_inplace(next, problem, u);
    return next;
}

BatchResult batch_dr(const QuadraticL1Problem& problem, double tol, int max_iter,
                     const DRState& initial)
{
    if (!(tol > 0.0)) throw InvalidParameter("batch_dr: tol must be positive");
    if (max_iter < 1) throw InvalidParameter("batch_dr: max_iter must be >= 1");
    check_state(initial, problem);

    BatchResult out;
    DRState s = initial;
    Vector u, z_prev, x_prev;
    for (int k = 1; k <= max_iter; ++k) {
        z_prev = s.z;
        x_prev = s.x;
        detail::dr_step_inplace(s, problem, u);
        const double res = (s.z - z_prev).norm();
        out.residual_history.push_back(res);
        out.iterations = k;
        // The x increment only matters on a first step taken from a state
        // whose x is not the proximal point of z (e.g. the all-zero start).
        if (res <= tol && (s.x - x_prev).norm() <= tol) {
            out.converged = true;
            break;
        }
    }
    out.x_star = std::move(s.x);
    out.z_star = std::move(s.z);
    return out;
}

DRState odr_round(const DRState& state, const QuadraticL1Problem& problem, const OnlineConfig& cfg)
{
    if (cfg.r < 1) throw InvalidParameter("odr_round: r must be >= 1");
    check_state(state, problem);
    DRState s = state;
    Vector u;
    for (int h = 0; h < cfg.r; ++h) detail::dr_step_inplace(s, problem, u);
    return s;
}

bool ist_step_majorizes(const QuadraticL1Problem& problem, double tau)
{
    return tau > 0.0 && tau * problem.max_eigenvalue() < 1.0;
}

Vector oist_round(const Vector& x, const QuadraticL1Problem& problem, const OnlineConfig& cfg,
                  IstDiagnostics* diagnostics)
{
    if (cfg.r < 1) throw InvalidParameter("oist_round: r must be >= 1");
    if (!(cfg.tau > 0.0)) throw InvalidParameter("oist_round: tau must be positive");
    detail::require_dim(x.size(), problem.dim(), "oist_round");
    if (diagnostics && !ist_step_majorizes(problem, cfg.tau)) {
        ++diagnostics->unsafe_steps;
    }

    const double tau = cfg.tau;
    const double threshold = problem.lambda() * tau;
    Vector cur = x;
    Vector w(x.size());
    for (int h = 0; h < cfg.r; ++h) {
        w.noalias() = cur - tau * (problem.Q() * cur) - tau * problem.phi();
        soft_threshold_inplace(w, threshold);
        cur.swap(w);
    }
    return cur;
}

namespace {

// Feature-sign active-set search started from the support and signs of u.
// Each pass solves Q_SS x_S = -phi_S - lambda s_S, moves towards that point
// as far as the objective keeps decreasing (stopping where a coefficient
// crosses zero), then adds the most violating zero coordinate. The objective
// decreases strictly, so the search ends at an exact minimizer.
bool polish_on_support(const QuadraticL1Problem& problem, const Vector& u, Vector& x)
{
    const Eigen::Index n = problem.dim();
    const double lambda = problem.lambda();
    x = u;
    Vector theta = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) theta[i] = (x[i] > 0.0) - (x[i] < 0.0);

    const int max_passes = 20 * static_cast<int>(n) + 20;
    for (int pass = 0; pass < max_passes; ++pass) {
        std::vector<Eigen::Index> support;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (theta[i] != 0.0) support.push_back(i);
        }
        if (!support.empty()) {
            const auto k = static_cast<Eigen::Index>(support.size());
            Matrix qss(k, k);
            Vector rhs(k);
            for (Eigen::Index a = 0; a < k; ++a) {
                const Eigen::Index i = support[a];
                rhs[a] = -problem.phi()[i] - lambda * theta[i];
                for (Eigen::Index b = 0; b < k; ++b) qss(a, b) = problem.Q()(i, support[b]);
            }
            Eigen::LLT<Matrix> llt(qss);
            if (llt.info() != Eigen::Success) return false;
            const Vector xs = llt.solve(rhs);

            Vector target = Vector::Zero(n);
            for (Eigen::Index a = 0; a < k; ++a) target[support[a]] = xs[a];
            // Candidates: the target and every zero crossing on the way.
            Vector best = target;
            double best_f = objective_value(target, problem);
            for (Eigen::Index i : support) {
                const double d = target[i] - x[i];
                if (d == 0.0) continue;
                const double s = -x[i] / d;
                if (!(s > 0.0 && s < 1.0)) continue;
                Vector c = x + s * (target - x);
                c[i] = 0.0;
                const double f = objective_value(c, problem);
                if (f < best_f) best = std::move(c), best_f = f;
            }
            x = std::move(best);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (x[i] == 0.0) {
                    theta[i] = 0.0;
                } else if ((x[i] > 0.0) != (theta[i] > 0.0)) {
                    theta[i] = x[i] > 0.0 ? 1.0 : -1.0;
                }
            }
        } else {
            x.setZero();
        }

        const Vector g = problem.Q() * x + problem.phi();
        const double tol = 1e-12 * std::max({1.0, problem.phi().lpNorm<Eigen::Infinity>(), lambda});
        bool support_optimal = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (x[i] != 0.0 && std::abs(g[i] + lambda * theta[i]) > tol) support_optimal = false;
        }
        if (!support_optimal) continue;
        Eigen::Index worst = -1;
        double worst_excess = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (x[i] == 0.0 && std::abs(g[i]) - lambda > worst_excess) {
                worst = i;
                worst_excess = std::abs(g[i]) - lambda;
            }
        }
        if (worst < 0) return true;
        theta[worst] = g[worst] > 0.0 ? -1.0 : 1.0;
    }
    return false;
}

double oracle_acceptance(const QuadraticL1Problem& problem)
{
    const double scale = std::max({1.0, problem.phi().lpNorm<Eigen::Infinity>(), problem.lambda()});
    return 1e-10 * scale;
}

}  // namespace

OracleSolution oracle_minimizer(const QuadraticL1Problem& problem)
{
    const Eigen::Index n = problem.dim();
    const double accept = oracle_acceptance(problem);
    constexpr int kPolishEvery = 10;

    DRState s = DRState::zeros(n);
    Vector u, z_prev, candidate;
    std::vector<signed char> tried, pattern(static_cast<size_t>(n));

    auto finish = [&](Vector x, int iters) {
        OracleSolution out;
        out.residual = optimality_residual(x, problem);
        out.z_star = x + problem.Q() * x + problem.phi();
        out.x_star = std::move(x);
        out.iterations = iters;
        return out;
    };

    for (int k = 1; k <= kOracleMaxIter; ++k) {
        z_prev = s.z;
        detail::dr_step_inplace(s, problem, u);

        if (k % kPolishEvery == 0) {
            for (Eigen::Index i = 0; i < n; ++i) {
                pattern[i] = static_cast<signed char>((u[i] > 0.0) - (u[i] < 0.0));
            }
            if (pattern != tried) {
                tried = pattern;
                if (polish_on_support(problem, u, candidate) &&
                    optimality_residual(candidate, problem) <= accept) {
                    return finish(std::move(candidate), k);
                }
            }
        }
        if ((s.z - z_prev).norm() <= kOracleTolerance) {
            if (optimality_residual(s.x, problem) <= accept) {
                return finish(s.x, k);
            }
            if (polish_on_support(problem, u, candidate) &&
                optimality_residual(candidate, problem) <= accept) {
                return finish(std::move(candidate), k);
            }
        }
    }
    throw NumericalError("oracle_minimizer: no verified minimizer after " +
                         std::to_string(kOracleMaxIter) + " iterations");
}

}  // namespace stvo
