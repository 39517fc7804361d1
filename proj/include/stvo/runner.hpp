#pragma once

// Online runs of O-IST, O-DR and O-DISTA over a stream of elastic-net
// blocks. In round t the algorithm plays its current estimate, f_t is
// revealed and scored at that estimate, then r inner iterations on f_t
// produce the next estimate.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stvo/core.hpp"
#include "stvo/distributed.hpp"
#include "stvo/metrics.hpp"
#include "stvo/scenarios.hpp"
#include "stvo/solvers.hpp"

namespace stvo {

enum class Algorithm { oist, odr, odista };

std::string to_string(Algorithm a);
// Throws InvalidInput on unknown names.
Algorithm parse_algorithm(std::string_view name);

struct OnlineStream {
  std::vector<Matrix> dictionaries;  // one per round, or one shared by all rounds
  std::vector<Vector> measurements;
  double lambda = 0.0;
  double mu = 0.0;
  std::vector<Vector> x_true;
  Graph graph;  // O-DISTA network; nodes own contiguous row groups

  int rounds() const { return static_cast<int>(measurements.size()); }
  bool constant_dictionary() const { return dictionaries.size() == 1; }
  const Matrix& dictionary(int t) const;
  ElasticNetData block(int t) const;
  void validate() const;
};

OnlineStream online_stream(const TvarxStream& s, Graph graph);
OnlineStream online_stream(const SyntheticStream& s, Graph graph);

// 4 nodes on a 3-regular ring, one contiguous row group each.
Graph tvarx_network();

struct RssRun {
  OnlineStream stream;
  std::vector<int> cells;  // occupied cell per step
};

// Walk `run`, measurements in dBm mapped to the working model; the network
// links sensors within cfg.comm_radius_m.
RssRun rss_run(const RssModel& model, const RssConfig& cfg, std::uint64_t run);

// Per-round centralized problems; a constant dictionary shares one
// factorization.
std::vector<QuadraticL1Problem> centralized_problems(const OnlineStream& stream);

struct RunnerConfig {
  Algorithm algorithm = Algorithm::odr;
  int r = 1;
  double ist_tau_scale = 2.0;    // O-IST: tau = scale / ||A_t||^2
  double dista_tau_scale = 2.0;  // O-DISTA: tau_v = scale / ||A_v,t||^2
  bool dista_common_tau = false; // O-DISTA: tau = min_v ||A_v,t||^-2 instead
  bool oracle = true;

  void validate() const;
};

struct RunOutput {
  RunTrace trace;
  int ist_unsafe_steps = 0;
  std::vector<double> disagreement;  // O-DISTA, after each round
};

// Throws NumericalError if an oracle fails or an estimate stops being finite.
RunOutput run_online(const OnlineStream& stream, const RunnerConfig& cfg);
RunOutput run_online(const OnlineStream& stream, std::span<const QuadraticL1Problem> problems,
                     const RunnerConfig& cfg);

// Inner iterations that fit in budget_ms, timed on the first round and
// clamped to [1, cap]. O-DISTA nodes work concurrently, so a half-step costs
// the network time divided by |V|.
int calibrate_r(const OnlineStream& stream, const RunnerConfig& cfg, double budget_ms, int cap);

}  // namespace stvo
