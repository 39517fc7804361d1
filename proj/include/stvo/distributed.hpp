#pragma once

/*
 * Distributed iterative soft thresholding over an undirected graph with
 * self-loops. Node v holds (Q_v, phi_v) and an estimate x_v; the network
 * minimizes
 *
 *   F(X) = sum_v [ 1/2 x_v'Q_v x_v + phi_v'x_v + lambda ||x_v||_1
 *                  + 1/(2 d_v tau) sum_{w in N_v} ||xbar_w - x_v||^2 ]
 *
 * by alternating a communication half-step (c_v <- xbar_v) with a local
 * thresholded descent half-step
 *
 *   x_v <- S_{lambda tau_v / 2}[(x_v + cbar_v - tau_v Q_v x_v - tau_v phi_v) / 2].
 *
 * xbar_v is the mean over N_v (self included) with the node's own degree.
 * Both half-steps read only the pre-step state and write disjoint columns;
 * with OpenMP they run as a parallel loop over nodes.
 */

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "stvo/core.hpp"

namespace stvo {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

class Graph {
 public:
  Graph() = default;
  // Undirected edges between distinct or equal nodes; self-loops are always
  // added and duplicates are ignored.
  Graph(int n_nodes, const std::vector<std::pair<int, int>>& edges);

  int size() const { return static_cast<int>(adjacency_.size()); }
  // Sorted neighbourhood, v included.
  std::span<const int> neighbors(int v) const;
  int degree(int v) const;
  std::optional<int> regular_degree() const;
  bool is_regular() const { return regular_degree().has_value(); }
  // Computed once at construction; a disconnected graph is representable
  // but violates the standing topology assumption.
  bool connected() const { return connected_; }
  // Edges u < v, lexicographic.
  std::vector<std::pair<int, int>> edges() const;

 private:
  std::vector<std::vector<int>> adjacency_;
  bool connected_ = true;
};

// Each node linked to itself and its d - 1 nearest ring neighbours.
Graph ring_graph(int n_nodes, int d);
// Links nodes at Euclidean distance <= radius.
Graph radius_graph(std::span<const Point2> positions, double radius);

// One "u v" pair per line, self-loops implicit. The writer emits a
// "# nodes N" header that the reader honours; without it the node count is
// the largest id plus one. Lines starting with '#' or '%' are comments.
void write_edge_list(std::ostream& os, const Graph& graph);
Graph read_edge_list(std::istream& is);

class NodeData {
 public:
  // Dense symmetric positive definite Q_v.
  NodeData(Matrix Q, Vector phi);
  // Q_v = A_v'A_v + mu_v I, phi_v = -A_v'y_v, kept in factored form.
  static NodeData from_rows(const Matrix& A_v, const Vector& y_v, double mu_v);

  Eigen::Index dim() const { return phi_.size(); }
  const Vector& phi() const { return phi_; }
  bool factored() const { return factored_; }

  // out = Q_v x
  void apply_q(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const;
  Vector apply_q(const Vector& x) const;
  Matrix dense_q() const;

  double min_eigenvalue() const { return q_min_; }
  double max_eigenvalue() const { return q_max_; }
  // ||A_v||_2^2 for factored data, ||Q_v||_2 otherwise.
  double data_norm_sq() const { return data_norm_sq_; }

 private:
  NodeData() = default;

  Matrix q_;
  Matrix rows_;
  double shift_ = 0.0;
  bool factored_ = false;
  Vector phi_;
  double q_min_ = 0.0;
  double q_max_ = 0.0;
  double data_norm_sq_ = 0.0;
};

struct NetworkState {
  Matrix X;  // n x |V|, column v is node v's estimate
  Matrix C;  // n x |V|, consensus auxiliaries

  static NetworkState zeros(Eigen::Index n, int nodes)
  {
    return {Matrix::Zero(n, nodes), Matrix::Zero(n, nodes)};
  }
};

Vector local_mean(const Matrix& X, const Graph& graph, int v);

NetworkState dista_even_step(const NetworkState& state, const Graph& graph);
NetworkState dista_odd_step(const NetworkState& state, const Graph& graph,
                            std::span<const NodeData> data, double lambda,
                            std::span<const double> tau);

using HalfStepObserver = std::function<void(int h, const NetworkState&)>;

// r half-steps h = 0..r-1: even h communicates, odd h descends.
NetworkState odista_round(const NetworkState& state, const Graph& graph,
                          std::span<const NodeData> data, double lambda,
                          std::span<const double> tau, int r,
                          const HalfStepObserver& observer = {});

double global_objective(const Matrix& X, const Graph& graph,
                        std::span<const NodeData> data, double lambda, double tau);
double surrogate_objective(const Matrix& X, const Matrix& C, const Matrix& B,
                           const Graph& graph, std::span<const NodeData> data,
                           double lambda, double tau);

// F(X) as one quadratic-plus-l1 problem in vec(X) (column-major, node
// blocks): Hessian blkdiag(Q_v) + L (x) I_n with
// L = sum_v 1/(d_v tau) sum_{w in N_v} (W_w - e_v)'(W_w - e_v), W the
// local-mean operator. On regular graphs with a common tau, batch DISTA
// converges to its minimizer. Dense; meant for small networks.
QuadraticL1Problem stacked_objective_problem(const Graph& graph,
                                             std::span<const NodeData> data,
                                             double lambda, double tau);
Matrix coupling_laplacian(const Graph& graph, double tau);

// max_v ||I - tau_v Q_v||_2^2
double theta_tau(std::span<const NodeData> data, std::span<const double> tau);

struct BatchDistaResult {
  NetworkState state;
  int half_steps = 0;
  bool converged = false;
};

// Even/odd pairs until ||X_{k+1} - X_k||_F <= tol.
BatchDistaResult batch_dista(const Graph& graph, std::span<const NodeData> data,
                             double lambda, std::span<const double> tau,
                             double tol, int max_half_steps,
                             const NetworkState& initial);

// Row partition of one elastic-net block across a network. Rows are split
// into contiguous groups; ridge and l1 weights are divided by |V| so that
// sum_v f_v at consensus equals the centralized objective.
struct DistributedBlock {
  std::vector<NodeData> nodes;
  double lambda_node = 0.0;
};

DistributedBlock split_rows(const ElasticNetData& data, int n_nodes);
// Contiguous row group [first, first + count) of node v.
std::pair<Eigen::Index, Eigen::Index> row_range(Eigen::Index rows, int n_nodes, int v);

// tau_v = scale / ||A_v||_2^2
std::vector<double> per_node_tau(std::span<const NodeData> nodes, double scale);
// tau = min_v ||A_v||_2^{-2}, the same at every node
std::vector<double> common_safe_tau(std::span<const NodeData> nodes);

Vector network_mean(const Matrix& X);
double max_pairwise_disagreement(const Matrix& X);

// Straight-line serial transcriptions of the half-steps on dense data, kept
// for testing and benchmarking the parallel kernels.
namespace reference {
Vector local_mean(const Matrix& X, const Graph& graph, int v);
NetworkState dista_even_step(const NetworkState& state, const Graph& graph);
NetworkState dista_odd_step(const NetworkState& state, const Graph& graph,
                            std::span<const Matrix> Q, std::span<const Vector> phi,
                            double lambda, std::span<const double> tau);
}  // namespace reference

}  // namespace stvo
