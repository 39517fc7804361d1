#include "stvo/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

namespace stvo {

namespace {

void require_node(int v, int n, const char* what)
{
    if (v < 0 || v >= n) {
        throw InvalidInput(std::string(what) + ": node " + std::to_string(v) +
                           " out of range [0, " + std::to_string(n) + ")");
    }
}

bool bfs_connected(const std::vector<std::vector<int>>& adj)
{
    if (adj.empty()) return true;
    std::vector<char> seen(adj.size(), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    size_t count = 1;
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        for (int w : adj[static_cast<size_t>(v)]) {
            if (!seen[static_cast<size_t>(w)]) {
                seen[static_cast<size_t>(w)] = 1;
                ++count;
                frontier.push(w);
            }
        }
    }
    return count == adj.size();
}

}  // namespace

Graph::Graph(int n_nodes, const std::vector<std::pair<int, int>>& edges)
{
    if (n_nodes < 1) throw InvalidParameter("Graph: need at least one node");
    adjacency_.resize(static_cast<size_t>(n_nodes));
    for (int v = 0; v < n_nodes; ++v) adjacency_[static_cast<size_t>(v)].push_back(v);
    for (const auto& [a, b] : edges) {
        require_node(a, n_nodes, "Graph");
        require_node(b, n_nodes, "Graph");
        adjacency_[static_cast<size_t>(a)].push_back(b);
        adjacency_[static_cast<size_t>(b)].push_back(a);
    }
    for (auto& nbrs : adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    connected_ = bfs_connected(adjacency_);
}

std::span<const int> Graph::neighbors(int v) const
{
    require_node(v, size(), "Graph::neighbors");
    return adjacency_[static_cast<size_t>(v)];
}

int Graph::degree(int v) const
{
    return static_cast<int>(neighbors(v).size());
}

std::optional<int> Graph::regular_degree() const
{
    if (adjacency_.empty()) return std::nullopt;
    const size_t d = adjacency_.front().size();
    for (const auto& nbrs : adjacency_) {
        if (nbrs.size() != d) return std::nullopt;
    }
    return static_cast<int>(d);
}

std::vector<std::pair<int, int>> Graph::edges() const
{
    std::vector<std::pair<int, int>> out;
    for (int v = 0; v < size(); ++v) {
        for (int w : adjacency_[static_cast<size_t>(v)]) {
            if (w > v) out.emplace_back(v, w);
        }
    }
    return out;
}

Graph ring_graph(int n_nodes, int d)
{
    if (n_nodes < 1) throw InvalidParameter("ring_graph: need at least one node");
    if (d < 1 || d > n_nodes) {
        throw InvalidParameter("ring_graph: degree must lie in [1, n_nodes]");
    }
    // d - 1 neighbours split evenly; an even split needs odd d unless d = n.
    if (d != n_nodes && (d - 1) % 2 != 0) {
        throw InvalidParameter("ring_graph: d - 1 must be even for a regular ring");
    }
    std::vector<std::pair<int, int>> edges;
    const int half = (d - 1) / 2;
    for (int v = 0; v < n_nodes; ++v) {
        if (d == n_nodes) {
            for (int w = v + 1; w < n_nodes; ++w) edges.emplace_back(v, w);
        } else {
            for (int k = 1; k <= half; ++k) edges.emplace_back(v, (v + k) % n_nodes);
        }
    }
    return Graph(n_nodes, edges);
}

Graph radius_graph(std::span<const Point2> positions, double radius)
{
    if (!(radius >= 0.0)) throw InvalidParameter("radius_graph: radius must be >= 0");
    const int n = static_cast<int>(positions.size());
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double dx = positions[a].x - positions[b].x;
            const double dy = positions[a].y - positions[b].y;
            if (std::hypot(dx, dy) <= radius) edges.emplace_back(a, b);
        }
    }
    return Graph(n, edges);
}

void write_edge_list(std::ostream& os, const Graph& graph)
{
    os << "# nodes " << graph.size() << '\n';
    for (const auto& [a, b] : graph.edges()) os << a << ' ' << b << '\n';
}

Graph read_edge_list(std::istream& is)
{
    std::vector<std::pair<int, int>> edges;
    int declared = -1;
    int largest = -1;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#' || line[first] == '%') {
            std::istringstream header(line.substr(first + 1));
            std::string key;
            int n = 0;
            if (header >> key >> n && key == "nodes") declared = n;
            continue;
        }
        std::istringstream fields(line);
        long long a = 0, b = 0;
        std::string extra;
        if (!(fields >> a >> b) || (fields >> extra)) {
            throw InvalidInput("edge list line " + std::to_string(lineno) +
                               ": expected 'u v'");
        }
        if (a < 0 || b < 0 || a > 1'000'000 || b > 1'000'000) {
            throw InvalidInput("edge list line " + std::to_string(lineno) +
                               ": node id out of range");
        }
        edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
        largest = std::max({largest, static_cast<int>(a), static_cast<int>(b)});
    }
    const int n = declared > 0 ? declared : largest + 1;
    if (n < 1) throw InvalidInput("edge list: no nodes");
    if (largest >= n) throw InvalidInput("edge list: node id exceeds declared count");
    return Graph(n, edges);
}

NodeData::NodeData(Matrix Q, Vector phi) : q_(std::move(Q)), phi_(std::move(phi))
{
    if (q_.rows() != q_.cols() || q_.rows() == 0) {
        throw InvalidInput("NodeData: Q must be square and non-empty");
    }
    detail::require_dim(phi_.size(), q_.rows(), "NodeData phi");
    if (!q_.allFinite() || !phi_.allFinite()) throw InvalidInput("NodeData: non-finite data");
    if ((q_ - q_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
        throw InvalidInput("NodeData: Q is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(q_, Eigen::EigenvaluesOnly);
    q_min_ = eig.eigenvalues().minCoeff();
    q_max_ = eig.eigenvalues().maxCoeff();
    if (!(q_min_ > 0.0)) throw InvalidInput("NodeData: Q is not positive definite");
    data_norm_sq_ = q_max_;
}

NodeData NodeData::from_rows(const Matrix& A_v, const Vector& y_v, double mu_v)
{
    if (A_v.rows() < 1 || A_v.cols() < 1) throw InvalidInput("NodeData: empty row block");
    detail::require_dim(y_v.size(), A_v.rows(), "NodeData y");
    if (!(mu_v > 0.0)) throw InvalidParameter("NodeData: mu must be positive");
    if (!A_v.allFinite() || !y_v.allFinite()) throw InvalidInput("NodeData: non-finite data");

    NodeData out;
    out.factored_ = true;
    out.rows_ = A_v;
    out.shift_ = mu_v;
    out.phi_ = -(A_v.transpose() * y_v);

    // Nonzero spectrum of A'A from the smaller Gram matrix.
    const bool wide = A_v.rows() <= A_v.cols();
    const Matrix gram = wide ? Matrix(A_v * A_v.transpose()) : Matrix(A_v.transpose() * A_v);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double top = std::max(0.0, eig.eigenvalues().maxCoeff());
    const double bottom = std::max(0.0, eig.eigenvalues().minCoeff());
    out.data_norm_sq_ = top;
    out.q_max_ = top + mu_v;
    out.q_min_ = (A_v.rows() < A_v.cols() ? 0.0 : bottom) + mu_v;
    return out;
}

void NodeData::apply_q(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const
{
    if (factored_) {
        const Vector ax = rows_ * x;
        out.noalias() = rows_.transpose() * ax;
        out += shift_ * x;
    } else {
        out.noalias() = q_ * x;
    }
}

Vector NodeData::apply_q(const Vector& x) const
{
    detail::require_dim(x.size(), dim(), "NodeData::apply_q");
    Vector out(dim());
    apply_q(x, out);
    return out;
}

Matrix NodeData::dense_q() const
{
    if (!factored_) return q_;
    Matrix q = rows_.transpose() * rows_;
    q.diagonal().array() += shift_;
    return q;
}

Vector local_mean(const Matrix& X, const Graph& graph, int v)
{
    const auto nbrs = graph.neighbors(v);
    Vector acc = Vector::Zero(X.rows());
    for (int w : nbrs) acc += X.col(w);
    return acc / static_cast<double>(nbrs.size());
}

namespace {

void check_network(const NetworkState& s, const Graph& graph, const char* what)
{
    detail::require_dim(s.X.cols(), graph.size(), what);
    detail::require_dim(s.C.cols(), graph.size(), what);
    detail::require_dim(s.C.rows(), s.X.rows(), what);
}

void check_nodes(std::span<const NodeData> data, std::span<const double> tau,
                 const Graph& graph, Eigen::Index n, const char* what)
{
    detail::require_dim(static_cast<Eigen::Index>(data.size()), graph.size(), what);
    detail::require_dim(static_cast<Eigen::Index>(tau.size()), graph.size(), what);
    for (size_t v = 0; v < data.size(); ++v) {
        detail::require_dim(data[v].dim(), n, what);
        if (!(tau[v] > 0.0)) throw InvalidParameter(std::string(what) + ": tau must be positive");
    }
}

void even_into(const Matrix& X, const Graph& graph, Matrix& C)
{
    const int nodes = graph.size();
#if defined(STVO_HAVE_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (int v = 0; v < nodes; ++v) {
        auto col = C.col(v);
        col.setZero();
        const auto nbrs = graph.neighbors(v);
        for (int w : nbrs) col += X.col(w);
        col /= static_cast<double>(nbrs.size());
    }
}

void odd_into(const Matrix& X, const Matrix& C, const Graph& graph,
              std::span<const NodeData> data, double lambda,
              std::span<const double> tau, Matrix& out)
{
    const int nodes = graph.size();
    const Eigen::Index n = X.rows();
#if defined(STVO_HAVE_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (int v = 0; v < nodes; ++v) {
        Vector cbar = Vector::Zero(n);
        const auto nbrs = graph.neighbors(v);
        for (int w : nbrs) cbar += C.col(w);
        cbar /= static_cast<double>(nbrs.size());

        Vector qx(n);
        const auto tv = tau[static_cast<size_t>(v)];
        data[static_cast<size_t>(v)].apply_q(X.col(v), qx);
        auto col = out.col(v);
        col = 0.5 * (X.col(v) + cbar - tv * qx - tv * data[static_cast<size_t>(v)].phi());
        const double beta = 0.5 * lambda * tv;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = col[i];
            col[i] = a > beta ? a - beta : (a < -beta ? a + beta : 0.0);
        }
    }
}

}  // namespace

NetworkState dista_even_step(const NetworkState& state, const Graph& graph)
{
    check_network(state, graph, "dista_even_step");
    NetworkState next{state.X, Matrix(state.C.rows(), state.C.cols())};
    even_into(state.X, graph, next.C);
    return next;
}

NetworkState dista_odd_step(const NetworkState& state, const Graph& graph,
                            std::span<const NodeData> data, double lambda,
                            std::span<const double> tau)
{
    check_network(state, graph, "dista_odd_step");
    check_nodes(data, tau, graph, state.X.rows(), "dista_odd_step");
    if (!(lambda > 0.0)) throw InvalidParameter("dista_odd_step: lambda must be positive");
    NetworkState next{Matrix(state.X.rows(), state.X.cols()), state.C};
    odd_into(state.X, state.C, graph, data, lambda, tau, next.X);
    return next;
}

NetworkState odista_round(const NetworkState& state, const Graph& graph,
                          std::span<const NodeData> data, double lambda,
                          std::span<const double> tau, int r,
                          const HalfStepObserver& observer)
{
    if (r < 1) throw InvalidParameter("odista_round: r must be >= 1");
    if (!(lambda > 0.0)) throw InvalidParameter("odista_round: lambda must be positive");
    check_network(state, graph, "odista_round");
    check_nodes(data, tau, graph, state.X.rows(), "odista_round");

    NetworkState s = state;
    Matrix scratch(s.X.rows(), s.X.cols());
    for (int h = 0; h < r; ++h) {
        if (h % 2 == 0) {
            even_into(s.X, graph, scratch);
            s.C.swap(scratch);
        } else {
            odd_into(s.X, s.C, graph, data, lambda, tau, scratch);
            s.X.swap(scratch);
        }
        if (observer) observer(h, s);
    }
    return s;
}

namespace {

double node_cost(const NodeData& node, const Eigen::Ref<const Vector>& x, double lambda)
{
    Vector qx(x.size());
    node.apply_q(x, qx);
    return 0.5 * x.dot(qx) + node.phi().dot(x) + lambda * x.lpNorm<1>();
}

}  // namespace

double global_objective(const Matrix& X, const Graph& graph,
                        std::span<const NodeData> data, double lambda, double tau)
{
    detail::require_dim(X.cols(), graph.size(), "global_objective");
    detail::require_dim(static_cast<Eigen::Index>(data.size()), graph.size(), "global_objective");
    if (!(tau > 0.0)) throw InvalidParameter("global_objective: tau must be positive");

    Matrix means(X.rows(), X.cols());
    even_into(X, graph, means);
    double total = 0.0;
    for (int v = 0; v < graph.size(); ++v) {
        total += node_cost(data[static_cast<size_t>(v)], X.col(v), lambda);
        double spread = 0.0;
        for (int w : graph.neighbors(v)) spread += (means.col(w) - X.col(v)).squaredNorm();
        total += spread / (2.0 * graph.degree(v) * tau);
    }
    return total;
}

double surrogate_objective(const Matrix& X, const Matrix& C, const Matrix& B,
                           const Graph& graph, std::span<const NodeData> data,
                           double lambda, double tau)
{
    detail::require_dim(X.cols(), graph.size(), "surrogate_objective");
    detail::require_dim(C.cols(), graph.size(), "surrogate_objective");
    detail::require_dim(B.cols(), graph.size(), "surrogate_objective");
    detail::require_dim(static_cast<Eigen::Index>(data.size()), graph.size(), "surrogate_objective");
    if (!(tau > 0.0)) throw InvalidParameter("surrogate_objective: tau must be positive");

    double total = 0.0;
    Vector diff(X.rows()), qd(X.rows());
    for (int v = 0; v < graph.size(); ++v) {
        const NodeData& node = data[static_cast<size_t>(v)];
        total += node_cost(node, X.col(v), lambda);
        double spread = 0.0;
        for (int w : graph.neighbors(v)) spread += (C.col(w) - X.col(v)).squaredNorm();
        total += spread / (2.0 * graph.degree(v) * tau);
        diff = X.col(v) - B.col(v);
        node.apply_q(diff, qd);
        total += 0.5 * (diff.squaredNorm() / tau - diff.dot(qd));
    }
    return total;
}

Matrix coupling_laplacian(const Graph& graph, double tau)
{
    if (!(tau > 0.0)) throw InvalidParameter("coupling_laplacian: tau must be positive");
    const int V = graph.size();
    Matrix W = Matrix::Zero(V, V);
    for (int w = 0; w < V; ++w) {
        for (int k : graph.neighbors(w)) W(w, k) = 1.0 / graph.degree(w);
    }
    Matrix L = Matrix::Zero(V, V);
    for (int v = 0; v < V; ++v) {
        const double weight = 1.0 / (graph.degree(v) * tau);
        for (int w : graph.neighbors(v)) {
            Eigen::RowVectorXd a = W.row(w);
            a[v] -= 1.0;
            L.noalias() += weight * a.transpose() * a;
        }
    }
    return L;
}

QuadraticL1Problem stacked_objective_problem(const Graph& graph,
                                             std::span<const NodeData> data,
                                             double lambda, double tau)
{
    detail::require_dim(static_cast<Eigen::Index>(data.size()), graph.size(),
                        "stacked_objective_problem");
    const int V = graph.size();
    const Eigen::Index n = data.front().dim();
    const Matrix L = coupling_laplacian(graph, tau);

    Matrix H = Matrix::Zero(n * V, n * V);
    Vector phi(n * V);
    for (int v = 0; v < V; ++v) {
        detail::require_dim(data[static_cast<size_t>(v)].dim(), n, "stacked_objective_problem");
        H.block(v * n, v * n, n, n) = data[static_cast<size_t>(v)].dense_q();
        phi.segment(v * n, n) = data[static_cast<size_t>(v)].phi();
        for (int w = 0; w < V; ++w) {
            if (L(v, w) != 0.0) H.block(v * n, w * n, n, n).diagonal().array() += L(v, w);
        }
    }
    // Round-off in the node blocks; symmetrize exactly.
    H = 0.5 * (H + H.transpose()).eval();
    return QuadraticL1Problem(std::move(H), std::move(phi), lambda);
}

double theta_tau(std::span<const NodeData> data, std::span<const double> tau)
{
    if (data.size() != tau.size()) throw InvalidInput("theta_tau: size mismatch");
    double worst = 0.0;
    for (size_t v = 0; v < data.size(); ++v) {
        const double a = std::abs(1.0 - tau[v] * data[v].min_eigenvalue());
        const double b = std::abs(1.0 - tau[v] * data[v].max_eigenvalue());
        const double s = std::max(a, b);
        worst = std::max(worst, s * s);
    }
    return worst;
}

BatchDistaResult batch_dista(const Graph& graph, std::span<const NodeData> data,
                             double lambda, std::span<const double> tau,
                             double tol, int max_half_steps,
                             const NetworkState& initial)
{
    if (!(tol > 0.0)) throw InvalidParameter("batch_dista: tol must be positive");
    if (max_half_steps < 2) throw InvalidParameter("batch_dista: need at least two half-steps");
    if (!(lambda > 0.0)) throw InvalidParameter("batch_dista: lambda must be positive");
    check_network(initial, graph, "batch_dista");
    check_nodes(data, tau, graph, initial.X.rows(), "batch_dista");

    BatchDistaResult out;
    out.state = initial;
    Matrix next(initial.X.rows(), initial.X.cols());
    while (out.half_steps + 2 <= max_half_steps) {
        even_into(out.state.X, graph, out.state.C);
        odd_into(out.state.X, out.state.C, graph, data, lambda, tau, next);
        out.half_steps += 2;
        const double moved = (next - out.state.X).norm();
        out.state.X.swap(next);
        if (moved <= tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

std::pair<Eigen::Index, Eigen::Index> row_range(Eigen::Index rows, int n_nodes, int v)
{
    if (n_nodes < 1) throw InvalidParameter("row_range: need at least one node");
    require_node(v, n_nodes, "row_range");
    if (rows < n_nodes) throw InvalidInput("row_range: fewer rows than nodes");
    const Eigen::Index base = rows / n_nodes;
    const Eigen::Index extra = rows % n_nodes;
    const Eigen::Index first = v * base + std::min<Eigen::Index>(v, extra);
    return {first, base + (v < extra ? 1 : 0)};
}

DistributedBlock split_rows(const ElasticNetData& data, int n_nodes)
{
    data.validate();
    DistributedBlock out;
    out.lambda_node = data.lambda / n_nodes;
    const double mu_node = data.mu / n_nodes;
    for (int v = 0; v < n_nodes; ++v) {
        const auto [first, count] = row_range(data.A.rows(), n_nodes, v);
        out.nodes.push_back(NodeData::from_rows(data.A.middleRows(first, count),
                                                data.y.segment(first, count), mu_node));
    }
    return out;
}

std::vector<double> per_node_tau(std::span<const NodeData> nodes, double scale)
{
    if (!(scale > 0.0)) throw InvalidParameter("per_node_tau: scale must be positive");
    std::vector<double> out;
    out.reserve(nodes.size());
    for (const auto& node : nodes) {
        if (!(node.data_norm_sq() > 0.0)) {
            throw InvalidInput("per_node_tau: node with zero data");
        }
        out.push_back(scale / node.data_norm_sq());
    }
    return out;
}

std::vector<double> common_safe_tau(std::span<const NodeData> nodes)
{
    double largest = 0.0;
    for (const auto& node : nodes) largest = std::max(largest, node.data_norm_sq());
    if (!(largest > 0.0)) throw InvalidInput("common_safe_tau: all nodes have zero data");
    return std::vector<double>(nodes.size(), 1.0 / largest);
}

Vector network_mean(const Matrix& X)
{
    if (X.cols() == 0) throw InvalidInput("network_mean: no nodes");
    return X.rowwise().mean();
}

double max_pairwise_disagreement(const Matrix& X)
{
    double worst = 0.0;
    for (Eigen::Index a = 0; a < X.cols(); ++a) {
        for (Eigen::Index b = a + 1; b < X.cols(); ++b) {
            worst = std::max(worst, (X.col(a) - X.col(b)).norm());
        }
    }
    return worst;
}

namespace reference {

Vector local_mean(const Matrix& X, const Graph& graph, int v)
{
    const auto nbrs = graph.neighbors(v);
    Vector out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double s = 0.0;
        for (int w : nbrs) s += X(i, w);
        out[i] = s / static_cast<double>(nbrs.size());
    }
    return out;
}

NetworkState dista_even_step(const NetworkState& state, const Graph& graph)
{
    NetworkState next = state;
    for (int v = 0; v < graph.size(); ++v) next.C.col(v) = reference::local_mean(state.X, graph, v);
    return next;
}

NetworkState dista_odd_step(const NetworkState& state, const Graph& graph,
                            std::span<const Matrix> Q, std::span<const Vector> phi,
                            double lambda, std::span<const double> tau)
{
    NetworkState next = state;
    const Eigen::Index n = state.X.rows();
    for (int v = 0; v < graph.size(); ++v) {
        const Vector cbar = reference::local_mean(state.C, graph, v);
        const Matrix& q = Q[static_cast<size_t>(v)];
        const double t = tau[static_cast<size_t>(v)];
        for (Eigen::Index i = 0; i < n; ++i) {
            double qx = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) qx += q(i, j) * state.X(j, v);
            const double w = (state.X(i, v) + cbar[i] - t * qx -
                              t * phi[static_cast<size_t>(v)][i]) / 2.0;
            const double b = lambda * t / 2.0;
            next.X(i, v) = w > b ? w - b : (w < -b ? w + b : 0.0);
        }
    }
    return next;
}

}  // namespace reference

}  // namespace stvo
