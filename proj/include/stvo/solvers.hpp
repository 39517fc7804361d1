#pragma once

#include <vector>

#include "stvo/core.hpp"

namespace stvo {

// Douglas-Rachford iterate with unit step and unit relaxation. x is always
// the proximal point of the smooth part at z; u is transient.
struct DRState {
  Vector x;
  Vector z;

  static DRState zeros(Eigen::Index n) { return {Vector::Zero(n), Vector::Zero(n)}; }
};

enum class TauRule {
  fixed,            // OnlineConfig::tau as given
  scaled_spectral,  // tau = tau_scale / ||A_t||_2^2, resolved per round
};

struct OnlineConfig {
  int r = 1;
  double tau = 0.0;
  TauRule tau_rule = TauRule::fixed;
  double tau_scale = 2.0;

  void validate() const;
  // Returns a copy with tau resolved for a round whose data matrix has
  // squared spectral norm spectral_norm_sq (ignored for the fixed rule).
  OnlineConfig resolved(double spectral_norm_sq) const;
};

struct BatchResult {
  Vector x_star;
  Vector z_star;
  int iterations = 0;
  std::vector<double> residual_history;  // ||z_{k+1} - z_k||_2
  bool converged = false;
};

struct IstDiagnostics {
  int unsafe_steps = 0;  // rounds where (1/tau) I - Q was not positive definite
};

struct OracleSolution {
  Vector x_star;
  Vector z_star;  // DR fixed point: (Q + I) x_star + phi
  double residual = 0.0;
  int iterations = 0;
};

// u = S_lambda(2x - z); z+ = z + 2(u - x); x+ = (Q + I)^{-1}(z+ - phi).
// A relaxation alpha != 1 would enter as z+ = z + 2 alpha (u - x).
DRState dr_step(const DRState& state, const QuadraticL1Problem& problem);

BatchResult batch_dr(const QuadraticL1Problem& problem, double tol,
                     int max_iter, const DRState& initial);

// cfg.r plain DR steps against one time slice, warm-started from state.
DRState odr_round(const DRState& state, const QuadraticL1Problem& problem,
                  const OnlineConfig& cfg);

// cfg.r iterations of x <- S_{lambda tau}(x - tau Q x - tau phi). cfg.tau must
// already be resolved.
Vector oist_round(const Vector& x, const QuadraticL1Problem& problem,
                  const OnlineConfig& cfg, IstDiagnostics* diagnostics = nullptr);

// True when (1/tau) I - Q is positive definite.
bool ist_step_majorizes(const QuadraticL1Problem& problem, double tau);

// High-accuracy minimizer used as the regret reference. Runs batch DR and
// polishes on the support identified by the thresholded iterate; the result
// is accepted only if the subgradient condition holds. Throws NumericalError
// otherwise.
OracleSolution oracle_minimizer(const QuadraticL1Problem& problem);

inline constexpr double kOracleTolerance = 1e-12;
inline constexpr int kOracleMaxIter = 100000;

namespace detail {
// In-place DR step; u receives S_lambda(2x - z).
void dr_step_inplace(DRState& state, const QuadraticL1Problem& problem,
                     Vector& u);
}

}  // namespace stvo
