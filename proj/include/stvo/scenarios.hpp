#pragma once

// Data generators: compressed identification of a time-varying ARX model,
// RSS-based tracking of a target moving on a cell grid, and synthetic
// slowly varying elastic-net streams. Every generator is a pure function of
// its config; randomness comes from named sub-streams of the config seed.

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "stvo/core.hpp"
#include "stvo/distributed.hpp"

namespace stvo {

enum class RngStream : std::uint64_t {
  input = 1,
  noise = 2,
  walk = 3,
  training = 4,
  synthetic = 5,
  algorithm = 6,  // per-algorithm seeds when random numbers are not shared
};

// Independent generator for (seed, stream, index); index is usually the
// Monte-Carlo run or the round.
std::mt19937_64 substream(std::uint64_t seed, RngStream stream, std::uint64_t index = 0);

enum class Experiment { exp1, exp2 };
enum class TimeUnit { s, ms };

// a1 and b1 at time t. Experiment 1 takes seconds in [0, horizon]; experiment
// 2 takes its own unit and needs t > 0.
struct ArxParams {
  double a1;
  double b1;
};
ArxParams experiment_params(Experiment experiment, double t, double horizon = 1.0);

struct TvarxConfig {
  int P_true = 1;
  int Q_true = 1;
  int P_hat = 10;
  int Q_hat = 10;
  int m = 12;
  double snr_db = 25.0;  // +inf disables noise
  double horizon_s = 1.0;
  double sample_rate_hz = 1000.0;
  double lambda = 1e-2;
  double mu = 1e-6;
  Experiment experiment = Experiment::exp1;
  TimeUnit exp2_time_unit = TimeUnit::ms;
  std::uint64_t seed = 1;

  int n() const { return P_hat + Q_hat; }
  int samples() const;
  int warmup() const { return std::max(P_hat, Q_hat); }
  void validate() const;
};

// Arrays hold warmup() zero samples followed by samples() simulated ones;
// sample k = 1..samples() lives at index warmup() + k - 1.
struct TvarxSeries {
  Vector u;
  Vector y;
  std::vector<Vector> x_true;  // per simulated sample, length n
  int warmup = 0;
};

// run selects the Monte-Carlo realization; u and e use separate streams.
TvarxSeries tvarx_simulate(const TvarxConfig& cfg, std::uint64_t run = 0);
TvarxSeries tvarx_simulate(const TvarxConfig& cfg, std::uint64_t run, bool with_noise);

// Row j: (y[t+j-1], ..., y[t+j-P_hat], u[t+j-1], ..., u[t+j-Q_hat]) for
// array index t >= max(P_hat, Q_hat).
Matrix regressor_matrix(const Vector& y, const Vector& u, Eigen::Index t,
                        int m, int P_hat, int Q_hat);

struct TvarxStream {
  std::vector<ElasticNetData> blocks;
  std::vector<Vector> x_true;       // parameters at each block's last sample
  std::vector<double> block_end_s;  // time of that sample in seconds
};

TvarxStream tvarx_stream(const TvarxConfig& cfg, std::uint64_t run = 0);
TvarxStream tvarx_stream(const TvarxSeries& series, const TvarxConfig& cfg);

struct PathLoss {
  double p0_dbm = -40.0;
  double d0_m = 1.0;
  double exponent = 3.0;

  double rss_dbm(double distance_m) const;
};

struct RssConfig {
  double area_m = 25.0;
  double cell_m = 1.0;
  int sensors = 36;  // perfect square, regular grid
  int meas_per_sensor = 4;
  double snr_db = 25.0;
  double comm_radius_m = 4.5;
  double round_ms = 50.0;
  int path_length_steps = 100;
  std::uint64_t seed = 1;
  PathLoss pathloss;
  // Dictionary rows are the model plus the mean of training_draws shadowing
  // samples with standard deviation training_sigma_db.
  int training_draws = 8;
  double training_sigma_db = 2.0;
  // Weights of the elastic net on the working dictionary (see RssModel).
  double lambda = 0.2;
  double mu = 0.01;

  int grid_side() const;
  int n() const { return grid_side() * grid_side(); }
  int m() const { return sensors * meas_per_sensor; }
  void validate() const;
};

std::vector<Point2> rss_sensor_positions(const RssConfig& cfg);
Point2 cell_center(const RssConfig& cfg, int cell);
Matrix rss_dictionary(const RssConfig& cfg);
// Measurement rows of sensor s are s * meas_per_sensor + (0..meas_per_sensor-1).
std::vector<int> rss_row_owner(const RssConfig& cfg);

std::vector<int> target_walk(const RssConfig& cfg, int steps, std::uint64_t run = 0);
Vector cell_indicator(const RssConfig& cfg, int cell);
// y = A xtilde + e with per-vector SNR; deterministic in (seed, t).
Vector rss_measure(const Matrix& A, const Vector& x_true, double snr_db,
                   std::uint64_t seed, std::uint64_t t);

// Working form of the RSS problem. Exactly one cell is occupied, so removing
// the row means of the dBm dictionary from both A and y keeps y = A x exact;
// the centred columns are then normalized and the dictionary scaled to unit
// spectral norm. The occupied cell of a working estimate is its argmax.
struct RssModel {
  Matrix raw;           // dBm dictionary
  Matrix A;             // working dictionary
  Vector row_offset;    // row means of raw
  Vector column_norm;   // norms of the centred columns
  double scale = 1.0;   // spectral norm after column normalization

  Vector measurement(const Vector& y_dbm) const;
  // Working coordinates of the indicator of `cell`.
  Vector working_truth(int cell) const;
};

RssModel rss_model(const RssConfig& cfg);
int snap_to_cell(const Vector& x);

// Slowly varying elastic-net stream: A_t = A_0 + drift sin(2 pi t / period) A_1,
// fixed-support truth whose amplitudes oscillate with the same period.
struct SyntheticConfig {
  int m = 12;
  int n = 20;
  int sparsity = 3;
  int rounds = 60;
  double drift = 0.02;
  double period = 120.0;
  double noise = 0.01;
  double lambda = 1e-2;
  double mu = 1e-2;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticStream {
  std::vector<ElasticNetData> blocks;
  std::vector<Vector> x_true;
};

SyntheticStream synthetic_stream(const SyntheticConfig& cfg, std::uint64_t run = 0);

// Flat "key = value" text; '#' starts a comment. Duplicate keys are an error.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_config(std::istream& is);

// Each apply consumes the keys it knows into `used` and leaves others alone.
void apply_config(TvarxConfig& cfg, const ConfigMap& values, std::set<std::string>& used);
void apply_config(RssConfig& cfg, const ConfigMap& values, std::set<std::string>& used);
void apply_config(SyntheticConfig& cfg, const ConfigMap& values, std::set<std::string>& used);

std::string to_string(Experiment e);
std::string to_string(TimeUnit u);

}  // namespace stvo
