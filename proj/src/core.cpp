#include "stvo/core.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace stvo {

namespace detail {

void require_dim(Eigen::Index got, Eigen::Index want, const char* what)
{
    if (got != want) {
        throw InvalidInput(std::string(what) + ": dimension " +
                           std::to_string(got) + ", expected " +
                           std::to_string(want));
    }
}

}  // namespace detail

// Small systems keep an explicit inverse (one matrix-vector product per
// solve); larger ones go through the Cholesky factor.
inline constexpr Eigen::Index kExplicitInverseMaxDim = 64;

struct QuadraticL1Problem::Shifted {
    Eigen::LLT<Matrix> llt;
    std::optional<Matrix> inverse;
};

QuadraticL1Problem::QuadraticL1Problem(Matrix Q, Vector phi, double lambda)
    : phi_(std::move(phi)), lambda_(lambda)
{
    if (Q.rows() != Q.cols()) {
        throw InvalidInput("QuadraticL1Problem: Q is not square");
    }
    if (Q.rows() == 0) {
        throw InvalidInput("QuadraticL1Problem: empty problem");
    }
    detail::require_dim(phi_.size(), Q.rows(), "QuadraticL1Problem phi");
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
        throw InvalidParameter("QuadraticL1Problem: lambda must be positive");
    }
    if (!Q.allFinite() || !phi_.allFinite()) {
        throw InvalidInput("QuadraticL1Problem: non-finite data");
    }
    const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance) {
        throw InvalidInput("QuadraticL1Problem: Q is not symmetric (max "
                           "asymmetry " + std::to_string(asym) + ")");
    }

    Eigen::SelfAdjointEigenSolver<Matrix> eig(Q, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("QuadraticL1Problem: eigenvalue computation failed");
    }
    sigma_ = eig.eigenvalues().minCoeff();
    beta_ = eig.eigenvalues().maxCoeff();
    if (!(sigma_ > 0.0)) {
        throw InvalidInput("QuadraticL1Problem: Q is not positive definite "
                           "(smallest eigenvalue " + std::to_string(sigma_) +
                           ")");
    }

    auto shifted = std::make_shared<Shifted>();
    const Eigen::Index n = Q.rows();
    shifted->llt.compute(Q + Matrix::Identity(n, n));
    if (shifted->llt.info() != Eigen::Success) {
        throw NumericalError("QuadraticL1Problem: factorization of Q + I failed");
    }
    if (n <= kExplicitInverseMaxDim) {
        shifted->inverse = shifted->llt.solve(Matrix::Identity(n, n));
    }
    shifted_ = std::move(shifted);
    q_ = std::make_shared<const Matrix>(std::move(Q));
}

QuadraticL1Problem QuadraticL1Problem::with_phi(Vector phi) const
{
    detail::require_dim(phi.size(), dim(), "QuadraticL1Problem::with_phi");
    if (!phi.allFinite()) throw InvalidInput("QuadraticL1Problem: non-finite data");
    QuadraticL1Problem out = *this;
    out.phi_ = std::move(phi);
    return out;
}

Vector QuadraticL1Problem::solve_shifted(const Vector& rhs) const
{
    detail::require_dim(rhs.size(), dim(), "solve_shifted");
    if (shifted_->inverse) return (*shifted_->inverse) * rhs;
    return shifted_->llt.solve(rhs);
}

void QuadraticL1Problem::solve_shifted_inplace(Eigen::Ref<Vector> rhs) const
{
    if (shifted_->inverse) {
        rhs = (*shifted_->inverse) * rhs;  // Eigen evaluates into a temporary
    } else {
        shifted_->llt.solveInPlace(rhs);
    }
}

void ElasticNetData::validate() const
{
    if (A.rows() < 1 || A.cols() < 1) {
        throw InvalidInput("ElasticNetData: A must be at least 1x1");
    }
    detail::require_dim(y.size(), A.rows(), "ElasticNetData y");
    if (!(lambda > 0.0)) throw InvalidParameter("ElasticNetData: lambda must be positive");
    if (!(mu > 0.0)) throw InvalidParameter("ElasticNetData: mu must be positive");
    if (!A.allFinite() || !y.allFinite()) {
        throw InvalidInput("ElasticNetData: non-finite data");
    }
}

void soft_threshold_inplace(Eigen::Ref<Vector> z, double beta)
{
    if (!(beta > 0.0)) {
        throw InvalidParameter("soft_threshold: beta must be positive");
    }
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double v = z[i];
        z[i] = v > beta ? v - beta : (v < -beta ? v + beta : 0.0);
    }
}

Vector soft_threshold(const Vector& z, double beta)
{
    Vector out = z;
    soft_threshold_inplace(out, beta);
    return out;
}

Vector prox_quadratic(const Vector& z, const QuadraticL1Problem& problem)
{
    detail::require_dim(z.size(), problem.dim(), "prox_quadratic");
    return problem.solve_shifted(z - problem.phi());
}

QuadraticL1Problem elastic_net_problem(const ElasticNetData& data)
{
    data.validate();
    const Eigen::Index n = data.A.cols();
    Matrix Q = Matrix::Zero(n, n);
    Q.selfadjointView<Eigen::Lower>().rankUpdate(data.A.transpose());
    Q = Q.selfadjointView<Eigen::Lower>();
    Q.diagonal().array() += data.mu;
    Vector phi = -(data.A.transpose() * data.y);
    // A'A + mu I is positive definite and finite for validated data, so a
    // rejection here comes from overflow or rounding.
    try {
        return QuadraticL1Problem(std::move(Q), std::move(phi), data.lambda);
    } catch (const InvalidInput& e) {
        throw NumericalError(std::string("elastic_net_problem: ") + e.what());
    }
}

ContractionConstants contraction_constants(double sigma, double beta)
{
    if (!(sigma > 0.0) || !(beta >= sigma)) {
        throw InvalidParameter("contraction_constants: need 0 < sigma <= beta");
    }
    const double delta = std::max((1.0 - sigma) / (1.0 + sigma),
                                  (beta - 1.0) / (beta + 1.0));
    return {sigma, beta, delta, delta / (1.0 + sigma)};
}

ContractionConstants contraction_constants(const QuadraticL1Problem& problem)
{
    return contraction_constants(problem.min_eigenvalue(),
                                 problem.max_eigenvalue());
}

double objective_value(const Vector& x, const QuadraticL1Problem& problem)
{
    detail::require_dim(x.size(), problem.dim(), "objective_value");
    return 0.5 * x.dot(problem.Q() * x) + problem.phi().dot(x) +
           problem.lambda() * x.lpNorm<1>();
}

double optimality_residual(const Vector& x, const QuadraticL1Problem& problem)
{
    detail::require_dim(x.size(), problem.dim(), "optimality_residual");
    const Vector g = problem.Q() * x + problem.phi();
    const double lambda = problem.lambda();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double r;
        if (x[i] > 0.0) {
            r = std::abs(g[i] + lambda);
        } else if (x[i] < 0.0) {
            r = std::abs(g[i] - lambda);
        } else {
            r = std::max(0.0, std::abs(g[i]) - lambda);
        }
        worst = std::max(worst, r);
    }
    return worst;
}

}  // namespace stvo
