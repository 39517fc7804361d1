#pragma once

// Regret, path lengths and tracking errors over per-round traces, and the
// closed-form O-DR regret bound with its constants measured from the run.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stvo/core.hpp"

namespace stvo {

struct RoundRecord {
  int t = 0;
  Vector x;            // action played in round t, before f_t is revealed
  Vector x_next;       // estimate after processing f_t
  Vector z;            // DR auxiliary paired with x (O-DR only)
  double loss = 0.0;   // f_t(x)
  double oracle_loss = 0.0;
  Vector x_star;       // empty when the run has no oracle
  Vector z_star;
};

struct RunTrace {
  std::string algorithm;
  std::vector<RoundRecord> rounds;

  bool has_oracle() const;
  bool has_dr_state() const;
};

struct RegretSeries {
  std::vector<double> reg;         // Reg_t, t = 1..T
  std::vector<double> reg_over_t;  // Reg_t / t
};

RegretSeries dynamic_regret(const RunTrace& trace);
RegretSeries dynamic_regret(std::span<const double> loss, std::span<const double> oracle_loss);

// sum_t ||p_t - p_{t-1}||, or of squared norms.
double path_length(std::span<const Vector> points, bool squared = false);

class BoundInapplicable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct BoundConstants {
  double M_Q = 0, M_phi = 0, M_star = 0;
  double lambda = 0;
  Eigen::Index n = 0;
  double delta = 0, q = 0;
  int r = 1;
  double dz0 = 0, dzT = 0;  // ||z_1 - z*_0|| and ||z_T - z*_T||
  double alpha1 = 0, alpha2 = 0;
  double zeta1 = 0, zeta2 = 0, zeta3 = 0, zeta4 = 0;
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
  double kappa = 0;
  double eta0 = 0, eta1 = 0, eta2 = 0, eta3 = 0, eta4 = 0;
};

// Delta*_z, Delta*_x per round with x*_0 = z*_0 = 0.
struct OracleSteps {
  std::vector<double> dz, dx;
};
OracleSteps oracle_steps(const RunTrace& trace);

// Bounded data (finite M_Q, M_phi, M*) and a contraction delta^r < 1.
struct AssumptionCheck {
  bool holds = false;
  std::string reason;
};
AssumptionCheck check_bounded_run(std::span<const QuadraticL1Problem> problems,
                                  const RunTrace& trace, int r);

// M_Q, M_phi, M* = max(||x*_t||, ||z*_t||), delta = max_t delta_t and
// q = max_t q_t are maxima over the run; the proof chain then fixes the rest.
// Throws BoundInapplicable when delta^r >= 1 or the trace lacks oracle/DR data.
BoundConstants theorem1_constants(std::span<const QuadraticL1Problem> problems,
                                  const RunTrace& trace, int r);
BoundConstants theorem1_constants(double M_Q, double M_phi, double M_star,
                                  double lambda, Eigen::Index n, double delta,
                                  double q, int r, double dz0, double dzT);

// eta0 + sum_t (eta1 Dz + eta2 Dz^2 + eta3 Dx + eta4 Dx^2)
double theorem1_bound(const RunTrace& trace, const BoundConstants& constants);
double theorem1_bound(const OracleSteps& steps, const BoundConstants& constants);

// Per-block terms ||xtilde_s - xhat_s||^2 / (P + Q); the MSE is their sum.
std::vector<double> identification_mse_terms(std::span<const Vector> estimates,
                                             std::span<const Vector> truth,
                                             int P, int Q);
double identification_mse(std::span<const Vector> estimates,
                          std::span<const Vector> truth, int P, int Q);

struct TrackingDistances {
  std::vector<double> instantaneous;
  std::vector<double> cumulative;
};
TrackingDistances tracking_distances(std::span<const Vector> estimates,
                                     std::span<const Vector> truth);

// Least-squares fit Reg_t ~ b0 + b1 S_t + b2 S2_t with S_t, S2_t the running
// path sums; `sublinear` compares Reg_T / T with Reg_{T/2} / (T/2).
struct RegretTrend {
  double b0 = 0, b1 = 0, b2 = 0;
  double r_squared = 0;
  bool sublinear = false;
};
RegretTrend regret_trend(std::span<const double> reg, std::span<const double> path_step,
                         std::span<const double> path_step_sq);

}  // namespace stvo
