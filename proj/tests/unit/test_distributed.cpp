#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "../support/oracles.hpp"
#include "stvo/distributed.hpp"
#include "stvo/scenarios.hpp"
#include "stvo/solvers.hpp"

using namespace stvo;

namespace {

struct RingFixture {
    Graph graph = ring_graph(4, 3);
    ElasticNetData block;
    DistributedBlock split;
    std::vector<double> tau;

    explicit RingFixture(std::uint64_t seed, double mu = 1e-2)
    {
        std::mt19937_64 rng(seed);
        block = testing::random_elastic_net(12, 6, 0.1, mu, rng);
        split = split_rows(block, 4);
        tau = common_safe_tau(split.nodes);
    }
};

std::vector<Matrix> dense_q(const std::vector<NodeData>& nodes)
{
    std::vector<Matrix> out;
    for (const auto& n : nodes) out.push_back(n.dense_q());
    return out;
}

std::vector<Vector> phis(const std::vector<NodeData>& nodes)
{
    std::vector<Vector> out;
    for (const auto& n : nodes) out.push_back(n.phi());
    return out;
}

}  // namespace

TEST_CASE("ring_graph")
{
    const Graph g = ring_graph(4, 3);
    for (int i = 0; i < 4; ++i) {
        const auto nb = g.neighbors(i);
        std::vector<int> got(nb.begin(), nb.end());
        std::vector<int> want{(i + 3) % 4, i, (i + 1) % 4};
        std::sort(want.begin(), want.end());
        CHECK(got == want);
    }
    CHECK(g.regular_degree() == 3);
    CHECK(g.connected());

    const Graph one = ring_graph(1, 1);
    CHECK(one.size() == 1);
    CHECK(one.degree(0) == 1);
    CHECK(one.is_regular());
    CHECK_THROWS(ring_graph(4, 0));
}

TEST_CASE("radius_graph")
{
    const std::vector<Point2> pair{{0, 0}, {1, 0}};
    const Graph g = radius_graph(pair, 2.0);
    CHECK(g.edges() == std::vector<std::pair<int, int>>{{0, 1}});
    CHECK(g.connected());

    auto grid = [](double spacing) {
        std::vector<Point2> p;
        for (int r = 0; r < 6; ++r) {
            for (int c = 0; c < 6; ++c) p.push_back({c * spacing, r * spacing});
        }
        return p;
    };
    const Graph sparse = radius_graph(grid(5.0), 4.5);
    CHECK(sparse.edges().empty());
    CHECK_FALSE(sparse.connected());

    const auto pts = grid(4.0);
    const Graph lattice = radius_graph(pts, 4.5);
    std::vector<std::pair<int, int>> want;
    for (int u = 0; u < 36; ++u) {
        for (int v = u + 1; v < 36; ++v) {
            if (std::hypot(pts[u].x - pts[v].x, pts[u].y - pts[v].y) <= 4.5) want.emplace_back(u, v);
        }
    }
    CHECK(lattice.edges() == want);
    CHECK(lattice.edges().size() == 60);
    CHECK(lattice.connected());
    CHECK_FALSE(lattice.is_regular());
}

TEST_CASE("edge list round trip")
{
    const Graph g = ring_graph(6, 3);
    std::stringstream ss;
    write_edge_list(ss, g);
    const Graph back = read_edge_list(ss);
    CHECK(back.size() == 6);
    CHECK(back.edges() == g.edges());

    std::istringstream bad("0 x\n");
    CHECK_THROWS_AS(read_edge_list(bad), InvalidInput);
}

TEST_CASE("local_mean")
{
    const Graph g = ring_graph(4, 3);
    const Matrix same = Vector::LinSpaced(3, 1, 3).replicate(1, 4);
    for (int v = 0; v < 4; ++v) CHECK(local_mean(same, g, v).isApprox(same.col(0)));

    const Graph two = ring_graph(2, 2);
    Matrix X(1, 2);
    X << 0, 2;
    CHECK(local_mean(X, two, 0)[0] == doctest::Approx(1.0));
    CHECK(local_mean(X, two, 1)[0] == doctest::Approx(1.0));

    std::mt19937_64 rng(2);
    const Matrix R = testing::gaussian_matrix(3, 4, rng);
    CHECK(local_mean(R, g, 0).isApprox((R.col(3) + R.col(0) + R.col(1)) / 3.0));
    CHECK(local_mean(R, g, 2).isApprox((R.col(1) + R.col(2) + R.col(3)) / 3.0));
}

TEST_CASE("dista_even_step")
{
    const Graph g = ring_graph(4, 3);
    const Matrix cons = Vector::LinSpaced(5, -1, 1).replicate(1, 4);
    const NetworkState c = dista_even_step({cons, Matrix::Zero(5, 4)}, g);
    CHECK(c.C.isApprox(cons));
    CHECK(c.X == cons);

    std::mt19937_64 rng(6);
    const NetworkState s{testing::gaussian_matrix(5, 4, rng), testing::gaussian_matrix(5, 4, rng)};
    const NetworkState e = dista_even_step(s, g);
    CHECK(e.X == s.X);
    for (int v = 0; v < 4; ++v) CHECK(e.C.col(v).isApprox(local_mean(s.X, g, v)));
    CHECK((e.C - reference::dista_even_step(s, g).C).norm() <= 1e-12 * e.C.norm());
}

TEST_CASE("dista_odd_step")
{
    SUBCASE("zero data keeps zero")
    {
        const Graph g = ring_graph(4, 3);
        std::vector<NodeData> nodes(4, NodeData(Matrix::Identity(3, 3), Vector::Zero(3)));
        const std::vector<double> tau(4, 0.5);
        const NetworkState s = dista_odd_step(NetworkState::zeros(3, 4), g, nodes, 1.0, tau);
        CHECK(s.X.norm() == 0.0);
    }
    SUBCASE("single node hand evaluation")
    {
        const Graph g = ring_graph(1, 1);
        const std::vector<NodeData> nodes{NodeData(Matrix::Identity(1, 1), Vector::Constant(1, -3))};
        const std::vector<double> tau{0.5};
        const NetworkState s = dista_odd_step(NetworkState::zeros(1, 1), g, nodes, 1.0, tau);
        CHECK(s.X(0, 0) == doctest::Approx(0.5));
    }
    SUBCASE("matches the serial transcription on the ring")
    {
        RingFixture f(31);
        std::mt19937_64 rng(32);
        const NetworkState s{testing::gaussian_matrix(6, 4, rng), testing::gaussian_matrix(6, 4, rng)};
        const auto per_node = per_node_tau(f.split.nodes, 2.0);
        const NetworkState a = dista_odd_step(s, f.graph, f.split.nodes, f.split.lambda_node, per_node);
        const NetworkState b = reference::dista_odd_step(s, f.graph, dense_q(f.split.nodes),
                                                         phis(f.split.nodes), f.split.lambda_node,
                                                         per_node);
        CHECK((a.X - b.X).norm() <= 1e-12 * std::max(1.0, b.X.norm()));
        CHECK(a.C == s.C);
    }
}

TEST_CASE("odista_round")
{
    RingFixture f(41);
    std::mt19937_64 rng(42);
    const NetworkState s{testing::gaussian_matrix(6, 4, rng), testing::gaussian_matrix(6, 4, rng)};

    const NetworkState two = odista_round(s, f.graph, f.split.nodes, f.split.lambda_node, f.tau, 2);
    const NetworkState seq = dista_odd_step(dista_even_step(s, f.graph), f.graph, f.split.nodes,
                                            f.split.lambda_node, f.tau);
    CHECK(two.X == seq.X);
    CHECK(two.C == seq.C);

    int calls = 0;
    odista_round(s, f.graph, f.split.nodes, f.split.lambda_node, f.tau, 5,
                 [&](int h, const NetworkState&) { CHECK(h == calls++); });
    CHECK(calls == 5);
    CHECK_THROWS(odista_round(s, f.graph, f.split.nodes, f.split.lambda_node, f.tau, 0));
}

TEST_CASE("batch DISTA reaches the minimizer of the network objective")
{
    RingFixture f(51, 0.1);
    const auto stacked = stacked_objective_problem(f.graph, f.split.nodes, f.split.lambda_node, f.tau[0]);
    const OracleSolution o = oracle_minimizer(stacked);
    const Matrix Xs = Eigen::Map<const Matrix>(o.x_star.data(), 6, 4);
    const auto b = batch_dista(f.graph, f.split.nodes, f.split.lambda_node, f.tau, 1e-13, 4000000,
                               NetworkState::zeros(6, 4));
    REQUIRE(b.converged);
    CHECK((b.state.X - Xs).cwiseAbs().maxCoeff() < 1e-8);

    // F evaluated two ways.
    std::mt19937_64 rng(52);
    const Matrix X = testing::gaussian_matrix(6, 4, rng);
    const Vector v = Eigen::Map<const Vector>(X.data(), 24);
    const double direct = global_objective(X, f.graph, f.split.nodes, f.split.lambda_node, f.tau[0]);
    CHECK(objective_value(v, stacked) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("Frobenius contraction towards the network minimizer")
{
    RingFixture f(61, 0.1);
    const double theta = theta_tau(f.split.nodes, f.tau);
    REQUIRE(theta < 1.0);
    const auto o = oracle_minimizer(
        stacked_objective_problem(f.graph, f.split.nodes, f.split.lambda_node, f.tau[0]));
    const Matrix Xs = Eigen::Map<const Matrix>(o.x_star.data(), 6, 4);
    NetworkState s = NetworkState::zeros(6, 4);
    for (int round = 0; round < 20; ++round) {
        for (int r : {2, 4}) {
            const NetworkState next = odista_round(s, f.graph, f.split.nodes, f.split.lambda_node, f.tau, r);
            CHECK((next.X - Xs).norm() <=
                  std::pow((1.0 + theta) / 2.0, r / 2.0) * (s.X - Xs).norm() + 1e-8);
            s = next;
        }
    }
}

TEST_CASE("global and surrogate objectives")
{
    const Graph g = ring_graph(4, 3);
    std::vector<NodeData> zero(4, NodeData(Matrix::Identity(3, 3), Vector::Zero(3)));
    CHECK(global_objective(Matrix::Zero(3, 4), g, zero, 1.0, 0.5) == 0.0);
    CHECK(surrogate_objective(Matrix::Zero(3, 4), Matrix::Zero(3, 4), Matrix::Zero(3, 4), g, zero,
                              1.0, 0.5) == 0.0);

    RingFixture f(71);
    const double lambda = f.split.lambda_node, tau = f.tau[0];
    std::mt19937_64 rng(72);
    const Vector x = testing::gaussian_vector(6, rng);
    const Matrix cons = x.replicate(1, 4);
    double sum = 0.0;
    for (const auto& n : f.split.nodes) {
        sum += 0.5 * x.dot(n.apply_q(x)) + n.phi().dot(x) + lambda * x.lpNorm<1>();
    }
    CHECK(global_objective(cons, f.graph, f.split.nodes, lambda, tau) == doctest::Approx(sum));

    const Matrix X = testing::gaussian_matrix(6, 4, rng);
    double direct = 0.0;
    for (int v = 0; v < 4; ++v) {
        const auto& n = f.split.nodes[static_cast<std::size_t>(v)];
        const Vector xv = X.col(v);
        direct += 0.5 * xv.dot(n.dense_q() * xv) + n.phi().dot(xv) + lambda * xv.lpNorm<1>();
        for (int w : f.graph.neighbors(v)) {
            direct += (reference::local_mean(X, f.graph, w) - xv).squaredNorm() / (2.0 * 3 * tau);
        }
    }
    const double F = global_objective(X, f.graph, f.split.nodes, lambda, tau);
    CHECK(F == doctest::Approx(direct).epsilon(1e-12));

    Matrix means(6, 4);
    for (int v = 0; v < 4; ++v) means.col(v) = local_mean(X, f.graph, v);
    CHECK(surrogate_objective(X, means, X, f.graph, f.split.nodes, lambda, tau) ==
          doctest::Approx(F).epsilon(1e-12));
    for (int k = 0; k < 20; ++k) {
        const Matrix B = testing::gaussian_matrix(6, 4, rng);
        CHECK(surrogate_objective(X, means, B, f.graph, f.split.nodes, lambda, tau) >= F - 1e-12);
    }
}

TEST_CASE("split_rows and step sizes")
{
    std::mt19937_64 rng(81);
    const ElasticNetData d = testing::random_elastic_net(12, 5, 0.4, 0.2, rng);
    const DistributedBlock b = split_rows(d, 4);
    REQUIRE(b.nodes.size() == 4);
    CHECK(b.lambda_node == doctest::Approx(0.1));
    Matrix Q = Matrix::Zero(5, 5);
    Vector phi = Vector::Zero(5);
    for (const auto& n : b.nodes) {
        Q += n.dense_q();
        phi += n.phi();
    }
    const auto central = elastic_net_problem(d);
    CHECK(Q.isApprox(central.Q()));
    CHECK(phi.isApprox(central.phi()));

    const double full = (d.A.transpose() * d.A).eigenvalues().real().maxCoeff();
    for (const auto& n : b.nodes) CHECK(n.data_norm_sq() <= full + 1e-12);
    const auto tau = common_safe_tau(b.nodes);
    double worst = 0.0;
    for (const auto& n : b.nodes) worst = std::max(worst, n.data_norm_sq());
    for (double t : tau) CHECK(t == doctest::Approx(1.0 / worst));
    const auto per = per_node_tau(b.nodes, 2.0);
    for (std::size_t v = 0; v < 4; ++v) CHECK(per[v] == doctest::Approx(2.0 / b.nodes[v].data_norm_sq()));

    CHECK(row_range(12, 4, 0) == std::pair<Eigen::Index, Eigen::Index>{0, 3});
    CHECK(row_range(10, 4, 3).second >= 2);
    CHECK_THROWS(split_rows(d, 13));
}

TEST_CASE("network summaries")
{
    Matrix X(2, 3);
    X << 0, 1, 2, 0, 0, 3;
    CHECK(network_mean(X).isApprox(Eigen::Vector2d(1, 1)));
    CHECK(max_pairwise_disagreement(X) == doctest::Approx(std::sqrt(13.0)));
}
