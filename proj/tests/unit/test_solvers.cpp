#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "stvo/scenarios.hpp"
#include "stvo/solvers.hpp"

using namespace stvo;

namespace {

Vector scalar(double v)
{
    return Vector::Constant(1, v);
}

QuadraticL1Problem scalar_problem(double q, double p, double lambda)
{
    return QuadraticL1Problem(Matrix::Constant(1, 1, q), scalar(p), lambda);
}

}  // namespace

TEST_CASE("dr_step hand evaluations")
{
    const auto zero = scalar_problem(1.0, 0.0, 10.0);
    const DRState o = dr_step(DRState::zeros(1), zero);
    CHECK(o.x[0] == 0.0);
    CHECK(o.z[0] == 0.0);

    const auto p = scalar_problem(1.0, -3.0, 1.0);
    const DRState s = dr_step(DRState::zeros(1), p);
    CHECK(s.z[0] == 0.0);
    CHECK(s.x[0] == doctest::Approx(1.5));

    CHECK_THROWS_AS(dr_step(DRState::zeros(2), p), InvalidInput);
}

TEST_CASE("dr_step iterates reach a subgradient-optimal point")
{
    std::mt19937_64 rng(21);
    const auto p = testing::prescribed_problem(5, 0.5, 3.0, 0.3, rng);
    DRState s = DRState::zeros(5);
    for (int k = 0; k < 500; ++k) s = dr_step(s, p);
    // x is the smooth prox of z; the optimal point is the thresholded one.
    const Vector u = soft_threshold(2.0 * s.x - s.z, p.lambda());
    CHECK(testing::satisfies_subgradient(u, p, 1e-6));
    CHECK((u - s.x).norm() < 1e-8);
}

TEST_CASE("batch_dr")
{
    SUBCASE("phi = 0 converges at the first iteration to 0")
    {
        const auto p = QuadraticL1Problem(Matrix::Identity(3, 3), Vector::Zero(3), 0.5);
        const BatchResult b = batch_dr(p, 1e-12, 100, DRState::zeros(3));
        CHECK(b.converged);
        CHECK(b.iterations == 1);
        CHECK(b.x_star.norm() == 0.0);
    }
    SUBCASE("agrees with proximal gradient")
    {
        std::mt19937_64 rng(4);
        Matrix Q = Matrix::Zero(2, 2);
        Q.diagonal() << 0.5, 3.0;
        const auto p = QuadraticL1Problem(Q, testing::gaussian_vector(2, rng), 0.1);
        const BatchResult b = batch_dr(p, 1e-12, 100000, DRState::zeros(2));
        CHECK(b.converged);
        CHECK((b.x_star - testing::proximal_gradient(p)).lpNorm<Eigen::Infinity>() < 1e-6);
    }
    SUBCASE("Q-linear contraction of z")
    {
        std::mt19937_64 rng(8);
        const auto p = testing::prescribed_problem(6, 0.25, 9.0, 0.2, rng);
        const double delta = contraction_constants(p).delta;
        const BatchResult ref = batch_dr(p, 1e-13, 1000000, DRState::zeros(6));
        REQUIRE(ref.converged);
        DRState s = DRState::zeros(6);
        s.x = prox_quadratic(s.z, p);
        for (int k = 0; k < 60; ++k) {
            const DRState next = dr_step(s, p);
            CHECK((next.z - ref.z_star).norm() <= delta * (s.z - ref.z_star).norm() + 1e-9);
            s = next;
        }
    }
    CHECK_THROWS_AS(batch_dr(scalar_problem(1, 1, 1), 0.0, 10, DRState::zeros(1)),
                    InvalidParameter);
    CHECK_THROWS_AS(batch_dr(scalar_problem(1, 1, 1), 1e-9, 0, DRState::zeros(1)),
                    InvalidParameter);
}

TEST_CASE("odr_round")
{
    std::mt19937_64 rng(13);
    const auto p = testing::prescribed_problem(8, 0.3, 4.0, 0.2, rng);
    OnlineConfig cfg;

    SUBCASE("r = 1 is one dr_step, bitwise")
    {
        DRState s{testing::gaussian_vector(8, rng), testing::gaussian_vector(8, rng)};
        const DRState a = odr_round(s, p, cfg);
        const DRState b = dr_step(s, p);
        CHECK(a.x == b.x);
        CHECK(a.z == b.z);
    }
    SUBCASE("a static stream with r = 1 replays batch DR, bitwise")
    {
        DRState s = DRState::zeros(8);
        for (int t = 0; t < 37; ++t) s = odr_round(s, p, cfg);
        const BatchResult b = batch_dr(p, 1e-300, 37, DRState::zeros(8));
        CHECK(b.iterations == 37);
        CHECK(s.x == b.x_star);
        CHECK(s.z == b.z_star);
    }
    CHECK_THROWS_AS(odr_round(DRState::zeros(8), p, OnlineConfig{0}), InvalidParameter);
}

TEST_CASE("online DR contraction with a fresh primal iterate")
{
    // Starting a round from (prox(z_t), z_t), r DR steps on f_t contract
    // ||z - z*_t|| by delta^r and ||x - x*_t|| <= ||z - z*_t|| / (1 + sigma).
    for (double mu : {1e-6, 1e-2, 1e-1}) {
        for (int r : {1, 2, 5}) {
            SyntheticConfig sc;
            sc.mu = mu;
            sc.rounds = 30;
            const SyntheticStream st = synthetic_stream(sc);
            DRState s = DRState::zeros(sc.n);
            for (const auto& block : st.blocks) {
                const auto p = elastic_net_problem(block);
                const auto cc = contraction_constants(p);
                const OracleSolution o = oracle_minimizer(p);
                s.x = prox_quadratic(s.z, p);
                const double dz = (s.z - o.z_star).norm();
                const DRState next = odr_round(s, p, OnlineConfig{r});
                const double dr = std::pow(cc.delta, r);
                CHECK((next.z - o.z_star).norm() <= dr * dz + 1e-8);
                CHECK((next.x - o.x_star).norm() <= dr / (1.0 + cc.sigma) * dz + 1e-8);
                if (r == 1) CHECK((next.x - o.x_star).norm() <= cc.q * dz + 1e-8);
                s = next;
            }
        }
    }
}

TEST_CASE("oist_round")
{
    OnlineConfig cfg;
    cfg.tau = 0.5;
    const auto zero = QuadraticL1Problem(Matrix::Identity(3, 3), Vector::Zero(3), 1.0);
    for (int r : {1, 7, 50}) {
        cfg.r = r;
        CHECK(oist_round(Vector::Zero(3), zero, cfg).norm() == 0.0);
    }
    cfg.r = 1;
    CHECK(oist_round(scalar(0.0), scalar_problem(1, -3, 1), cfg)[0] == doctest::Approx(1.0));

    std::mt19937_64 rng(17);
    const auto p = testing::prescribed_problem(6, 0.5, 3.0, 0.3, rng);
    cfg.tau = 0.9 / p.max_eigenvalue();
    cfg.r = 5000;
    IstDiagnostics diag;
    const Vector x = oist_round(Vector::Zero(6), p, cfg, &diag);
    CHECK(testing::satisfies_subgradient(x, p, 1e-6));
    CHECK(diag.unsafe_steps == 0);

    cfg.tau = 2.0 / p.min_eigenvalue();
    cfg.r = 1;
    oist_round(Vector::Zero(6), p, cfg, &diag);
    CHECK(diag.unsafe_steps == 1);
    CHECK_FALSE(ist_step_majorizes(p, cfg.tau));

    cfg.tau = 0.0;
    CHECK_THROWS_AS(oist_round(Vector::Zero(6), p, cfg), InvalidParameter);
}

TEST_CASE("OnlineConfig resolves a spectral step")
{
    OnlineConfig cfg;
    cfg.tau_rule = TauRule::scaled_spectral;
    cfg.tau_scale = 2.0;
    CHECK(cfg.resolved(8.0).tau == doctest::Approx(0.25));
    CHECK(cfg.resolved(8.0).tau_rule == TauRule::fixed);
    CHECK_THROWS_AS(cfg.resolved(0.0), InvalidParameter);
    OnlineConfig fixed;
    CHECK_THROWS_AS(fixed.validate(), InvalidParameter);
}

TEST_CASE("oracle_minimizer")
{
    const auto zero = QuadraticL1Problem(Matrix::Identity(4, 4), Vector::Zero(4), 0.1);
    CHECK(oracle_minimizer(zero).x_star.norm() == 0.0);

    // Scalar closed form: x* = S_lambda(-p) / q.
    for (double q : {0.5, 2.0}) {
        for (double p : {-3.0, -0.5, 0.2, 4.0}) {
            const double lambda = 1.0;
            const double expect = (std::abs(p) > lambda ? -(p - std::copysign(lambda, p)) : 0.0) / q;
            CHECK(oracle_minimizer(scalar_problem(q, p, lambda)).x_star[0] ==
                  doctest::Approx(expect).epsilon(1e-12));
        }
    }

    std::mt19937_64 rng(23);
    for (int k = 0; k < 5; ++k) {
        const auto p = elastic_net_problem(testing::random_elastic_net(12, 20, 1e-2, 1e-6, rng));
        const OracleSolution o = oracle_minimizer(p);
        CHECK(optimality_residual(o.x_star, p) < 1e-10 * std::max(1.0, p.phi().lpNorm<Eigen::Infinity>()));
        CHECK((o.z_star - (o.x_star + p.Q() * o.x_star + p.phi())).norm() < 1e-12);
        // z* is a fixed point of the DR map.
        const DRState f = dr_step(DRState{o.x_star, o.z_star}, p);
        CHECK((f.z - o.z_star).norm() < 1e-8);
    }
}

TEST_CASE("oracle_minimizer handles supports larger than the row count")
{
    // 13 nonzeros on a 12-row block: the support system is close to singular
    // and plain DR crawls along its null direction.
    TvarxConfig cfg;
    const TvarxStream st = tvarx_stream(cfg, 143);
    const auto p = elastic_net_problem(st.blocks[33]);
    const OracleSolution o = oracle_minimizer(p);
    CHECK(testing::satisfies_subgradient(o.x_star, p, 1e-9));
}
