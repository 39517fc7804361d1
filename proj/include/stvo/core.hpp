#pragma once

/*
 * Time slices of the sparse tracking problem
 *
 *        f_t(x) = 1/2 x' Q_t x + phi_t' x + lambda ||x||_1
 *
 * with Q_t symmetric positive definite, together with the two proximal
 * maps used by the splitting solvers, the elastic-net reduction
 *
 *        1/2 ||y - A x||^2 + mu/2 ||x||^2 + lambda ||x||_1
 *          = 1/2 x'(A'A + mu I)x - (A'y)'x + lambda ||x||_1 + 1/2 ||y||^2
 *
 * (the constant 1/2 ||y||^2 is dropped everywhere), and the linear rate
 * constants of Douglas-Rachford with unit step.
 */

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace stvo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kSymmetryTolerance = 1e-10;

class QuadraticL1Problem {
 public:
  // Validates symmetry (1e-10), positive definiteness and lambda > 0, then
  // caches extreme eigenvalues and a factorization of Q + I.
  QuadraticL1Problem(Matrix Q, Vector phi, double lambda);

  const Matrix& Q() const { return *q_; }
  const Vector& phi() const { return phi_; }
  double lambda() const { return lambda_; }
  Eigen::Index dim() const { return phi_.size(); }

  double min_eigenvalue() const { return sigma_; }
  double max_eigenvalue() const { return beta_; }

  // Same Q (shared, including the cached factorization) with a new linear
  // term; for streams whose data matrix does not change.
  QuadraticL1Problem with_phi(Vector phi) const;

  // (Q + I)^{-1} rhs
  Vector solve_shifted(const Vector& rhs) const;
  void solve_shifted_inplace(Eigen::Ref<Vector> rhs) const;

 private:
  struct Shifted;

  QuadraticL1Problem() = default;

  std::shared_ptr<const Matrix> q_;
  Vector phi_;
  double lambda_ = 0.0;
  double sigma_ = 0.0;
  double beta_ = 0.0;
  std::shared_ptr<const Shifted> shifted_;
};

struct ElasticNetData {
  Matrix A;
  Vector y;
  double lambda = 0.0;
  double mu = 0.0;

  void validate() const;
};

struct ContractionConstants {
  double sigma;
  double beta;
  double delta;
  double q;
};

// out_i = sign(z_i) max(|z_i| - beta, 0); beta must be positive.
Vector soft_threshold(const Vector& z, double beta);
void soft_threshold_inplace(Eigen::Ref<Vector> z, double beta);

// (Q + I)^{-1}(z - phi), the proximal map of the smooth part.
Vector prox_quadratic(const Vector& z, const QuadraticL1Problem& problem);

// Throws NumericalError if rounding or overflow breaks positive definiteness.
QuadraticL1Problem elastic_net_problem(const ElasticNetData& data);

ContractionConstants contraction_constants(const QuadraticL1Problem& problem);
ContractionConstants contraction_constants(double sigma, double beta);

double objective_value(const Vector& x, const QuadraticL1Problem& problem);

// Largest violation of 0 in Qx + phi + lambda d||x||_1, componentwise.
double optimality_residual(const Vector& x, const QuadraticL1Problem& problem);

namespace detail {
void require_dim(Eigen::Index got, Eigen::Index want, const char* what);
}

}  // namespace stvo
