#include <doctest.h>

#include <cmath>

#include "stvo/runner.hpp"

using namespace stvo;

namespace {

OnlineStream small_stream(int rounds = 12)
{
    SyntheticConfig sc;
    sc.rounds = rounds;
    return online_stream(synthetic_stream(sc, 0), ring_graph(4, 3));
}

}  // namespace

TEST_CASE("algorithm names")
{
    for (Algorithm a : {Algorithm::oist, Algorithm::odr, Algorithm::odista}) {
        CHECK(parse_algorithm(to_string(a)) == a);
    }
    CHECK_THROWS_AS(parse_algorithm("admm"), InvalidInput);
}

TEST_CASE("OnlineStream validation")
{
    OnlineStream s = small_stream();
    CHECK_NOTHROW(s.validate());
    CHECK(s.rounds() == 12);
    CHECK_FALSE(s.constant_dictionary());
    s.dictionaries.pop_back();
    CHECK_THROWS_AS(s.validate(), InvalidInput);
    s = small_stream();
    s.mu = 0.0;
    CHECK_THROWS_AS(s.validate(), InvalidParameter);
    s = small_stream();
    s.graph = ring_graph(13, 3);
    CHECK_THROWS_AS(s.validate(), InvalidInput);
}

TEST_CASE("the played action precedes the revealed loss")
{
    const OnlineStream s = small_stream();
    const auto problems = centralized_problems(s);
    for (Algorithm a : {Algorithm::oist, Algorithm::odr, Algorithm::odista}) {
        RunnerConfig rc;
        rc.algorithm = a;
        rc.r = 4;
        const RunOutput out = run_online(s, problems, rc);
        const auto& R = out.trace.rounds;
        REQUIRE(R.size() == 12);
        CHECK(R[0].x.norm() == 0.0);
        for (std::size_t t = 0; t < R.size(); ++t) {
            CHECK(R[t].t == static_cast<int>(t + 1));
            CHECK(R[t].loss == doctest::Approx(objective_value(R[t].x, problems[t])));
            CHECK(R[t].loss >= R[t].oracle_loss - 1e-9);
            if (t > 0) CHECK(R[t].x == R[t - 1].x_next);
        }
        CHECK(out.trace.algorithm == to_string(a));
        CHECK(out.disagreement.size() == (a == Algorithm::odista ? 12u : 0u));
    }
}

TEST_CASE("O-DR runs replay odr_round")
{
    const OnlineStream s = small_stream();
    const auto problems = centralized_problems(s);
    RunnerConfig rc;
    rc.r = 3;
    const RunOutput out = run_online(s, problems, rc);
    DRState st = DRState::zeros(20);
    for (std::size_t t = 0; t < problems.size(); ++t) {
        CHECK(out.trace.rounds[t].z == st.z);
        st = odr_round(st, problems[t], OnlineConfig{3});
        CHECK(out.trace.rounds[t].x_next == st.x);
    }
}

TEST_CASE("runs without an oracle carry NaN oracle losses")
{
    const OnlineStream s = small_stream(5);
    RunnerConfig rc;
    rc.oracle = false;
    const RunOutput out = run_online(s, rc);
    for (const auto& r : out.trace.rounds) {
        CHECK(std::isnan(r.oracle_loss));
        CHECK(r.x_star.size() == 0);
    }
    CHECK_FALSE(out.trace.has_oracle());
}

TEST_CASE("O-IST with the doubled step reports unsafe rounds")
{
    const OnlineStream s = small_stream(6);
    RunnerConfig rc;
    rc.algorithm = Algorithm::oist;
    rc.ist_tau_scale = 2.0;
    CHECK(run_online(s, rc).ist_unsafe_steps == 6);
    rc.ist_tau_scale = 0.9;
    CHECK(run_online(s, rc).ist_unsafe_steps == 0);
}

TEST_CASE("constant dictionaries share one factorization")
{
    OnlineStream s = small_stream(4);
    s.dictionaries.resize(1);
    const auto problems = centralized_problems(s);
    for (const auto& p : problems) CHECK(&p.Q() == &problems.front().Q());
}

TEST_CASE("calibrate_r stays within its bounds")
{
    const OnlineStream s = small_stream(3);
    RunnerConfig rc;
    CHECK(calibrate_r(s, rc, 1e-9, 100) == 1);
    CHECK(calibrate_r(s, rc, 1e6, 100) == 100);
    CHECK_THROWS_AS(calibrate_r(s, rc, 0.0, 100), InvalidParameter);
    CHECK_THROWS_AS(calibrate_r(s, rc, 1.0, 0), InvalidParameter);
    rc.r = 0;
    CHECK_THROWS_AS(rc.validate(), InvalidParameter);
}

TEST_CASE("RSS runs map dBm measurements to the working model")
{
    RssConfig cfg;
    cfg.path_length_steps = 5;
    cfg.snr_db = std::numeric_limits<double>::infinity();
    const RssModel model = rss_model(cfg);
    const RssRun run = rss_run(model, cfg, 0);
    REQUIRE(run.cells.size() == 5);
    CHECK(run.stream.constant_dictionary());
    for (int t = 0; t < 5; ++t) {
        CHECK((model.A * run.stream.x_true[t] - run.stream.measurements[t]).norm() < 1e-10);
    }
    CHECK(run.stream.graph.size() == 36);
    CHECK(run.stream.graph.connected());
}
