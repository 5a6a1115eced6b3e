#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edge_consensus/errors.hpp"
#include "edge_consensus/json_io.hpp"
#include "edge_consensus/scenario.hpp"
#include "support/test_support.hpp"

#include <cmath>

using namespace edge_consensus;

namespace {

Json two_integrator_json() {
    return Json::parse(R"({
        "graph": {"nodes": 2, "edges": [[1, 2]]},
        "model": {"a": [[0.0]], "b": [[1.0]]},
        "design": {"mode": "local", "mu": 1.0, "q1": 1.0, "r1": 1.0},
        "simulation": {"x0": [1.0, -1.0], "horizon": 16.0, "step": 0.001,
                       "record_every": 10},
        "outputs": {"dir": "out", "format": "json"}
    })");
}

Json drying_json(double mu) {
    Json j = Json::parse(R"({
        "graph": {"nodes": 9,
                  "edges": [[1,2],[2,3],[3,4],[4,5],[5,6],[6,7],[7,8],[8,9]]},
        "model": {"a": [[0.0, 1.0, 0.0], [0.0, -0.01, 0.2], [0.0, 0.0, -125.0]],
                  "b": [0.0, 0.0, 20.0],
                  "c": [1.0, 0.0, 0.0]},
        "design": {"mode": "first_order", "mu": 0.01, "q1": 1.0, "r1": 100.0},
        "simulation": {"seed": 7, "x0_scale": [0.01, 0.0, 0.0],
                       "horizon": 40.0, "step": 0.001, "record_every": 100}
    })");
    j["design"]["mu"] = mu;
    return j;
}

}  // namespace

TEST_CASE("matrix json round trip") {
    Matrix m(2, 3);
    m << 1, 2, 3, 4.5, -5, 6e-7;
    CHECK((matrix_from_json(matrix_to_json(m)) - m).norm() == 0.0);

    ComplexMatrix c(2, 2);
    c << Complex(1, 2), Complex(0, -1), Complex(3, 0), Complex(-2, 0.5);
    CHECK((complex_matrix_from_json(complex_matrix_to_json(c)) - c).norm() == 0.0);
}

TEST_CASE("scenario parsing and validation") {
    const Scenario sc = scenario_from_json(two_integrator_json(), "toy");
    CHECK(sc.graph.node_count == 2);
    CHECK(sc.model.state_dim() == 1);
    CHECK(sc.design.mode == DesignMode::LocalFullOrder);
    CHECK(sc.design.mu_values.size() == 1);
    CHECK(sc.simulation.x0.has_value());
    CHECK(sc.outputs.write_json);
    CHECK_FALSE(sc.outputs.write_csv);

    Json broken = two_integrator_json();
    broken["design"].erase("mu");
    CHECK_THROWS_AS(scenario_from_json(broken, "toy"), InputError);

    broken = two_integrator_json();
    broken["design"]["mu_values"] = {1.0, 2.0};
    CHECK_THROWS_AS(scenario_from_json(broken, "toy"), InputError);  // mu and mu_values

    broken = two_integrator_json();
    broken["simulation"]["seed"] = 3;
    CHECK_THROWS_AS(scenario_from_json(broken, "toy"), InputError);  // x0 and seed

    broken = two_integrator_json();
    broken["graph"]["edges"] = {{1, 1}};
    CHECK_THROWS_AS(scenario_from_json(broken, "toy"), InputError);  // self-loop
}

TEST_CASE("seeded initial states are deterministic and scaled per component") {
    Scenario sc = scenario_from_json(drying_json(0.01), "drying");
    const Vector x0_a = initial_state(sc);
    const Vector x0_b = initial_state(sc);
    CHECK((x0_a - x0_b).norm() == 0.0);
    REQUIRE(x0_a.size() == 27);
    for (int agent = 0; agent < 9; ++agent) {
        CHECK(std::abs(x0_a(agent * 3)) <= 0.01);
        CHECK(x0_a(agent * 3 + 1) == 0.0);
        CHECK(x0_a(agent * 3 + 2) == 0.0);
    }
    sc.simulation.seed = 8;
    CHECK((initial_state(sc) - x0_a).norm() > 0.0);
}

TEST_CASE("run_synthesize records the coupling bound verdict") {
    const Scenario sc = scenario_from_json(drying_json(0.01), "drying");
    const SynthesisOutcome outcome = run_synthesize(sc, 0.01);
    CHECK(outcome.gain.order == 1);
    CHECK(outcome.spectrum.closed_form);
    CHECK(outcome.spectrum.max_mismatch_mas < 1e-7);

    // Unit-weight 9-node path: 1/lambda_min = 1/(4 sin^2(pi/18)).
    const double expected_bound = 1.0 / (4.0 * std::pow(std::sin(M_PI / 18.0), 2));
    CHECK(outcome.mu_lower_bound_global == doctest::Approx(expected_bound).epsilon(1e-9));
    CHECK_FALSE(outcome.mu_meets_global_bound);

    const SynthesisOutcome at7 = run_synthesize(sc, 7.0);
    CHECK_FALSE(at7.mu_meets_global_bound);  // 7 < 8.29
    const SynthesisOutcome at9 = run_synthesize(sc, 9.0);
    CHECK(at9.mu_meets_global_bound);
}

TEST_CASE("run_simulate produces a consistent report") {
    const Scenario sc = scenario_from_json(two_integrator_json(), "toy");
    const SimulationOutcome outcome = run_simulate(sc, 1.0);
    CHECK(outcome.trajectory.samples() > 100);
    CHECK(outcome.state_disagreement.max_pairwise(0) == doctest::Approx(2.0));
    REQUIRE(outcome.time_to_consensus.has_value());
    // Gap decays as 2 e^{-2t}; threshold 1e-3 crossed at t = ln(2000)/2.
    CHECK(*outcome.time_to_consensus ==
          doctest::Approx(std::log(2.0 / 1e-3) / 2.0).epsilon(0.02));
    REQUIRE(outcome.state_disagreement.fitted_rate.has_value());
    CHECK(*outcome.state_disagreement.fitted_rate == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("run_verify passes on sound designs and fails on corrupted gains") {
    const Scenario sc = scenario_from_json(drying_json(0.01), "drying");
    const VerificationOutcome ok = run_verify(sc, 0.01);
    CHECK(ok.all_pass);
    for (const auto& cert : ok.certificates) {
        INFO(cert.name, " value=", cert.value, " tol=", cert.tolerance);
        CHECK(cert.pass);
    }
    // The path is a tree, so the fast-path certificate must be present.
    bool saw_tree_cert = false;
    for (const auto& cert : ok.certificates) {
        saw_tree_cert = saw_tree_cert || cert.name == "tree_fast_path";
    }
    CHECK(saw_tree_cert);

    ControllerGain corrupted = run_synthesize(sc, 0.01).gain;
    corrupted.k(0, 1) *= 1.1;
    const VerificationOutcome bad = run_verify(sc, 0.01, corrupted);
    CHECK_FALSE(bad.all_pass);
    bool spectrum_failed = false;
    for (const auto& cert : bad.certificates) {
        if (cert.name == "spectrum_match") spectrum_failed = !cert.pass;
    }
    CHECK(spectrum_failed);
}

TEST_CASE("gain json round trip preserves the closed-form machinery") {
    const Scenario sc = scenario_from_json(drying_json(0.01), "drying");
    const ControllerGain gain = run_synthesize(sc, 0.01).gain;
    const ControllerGain back = gain_from_json(gain_to_json(gain));
    CHECK((back.k - gain.k).norm() == 0.0);
    CHECK((back.p1 - gain.p1).norm() == 0.0);
    CHECK(back.mode == gain.mode);
    REQUIRE(back.basis.has_value());
    CHECK((back.basis->w - gain.basis->w).norm() == 0.0);
    CHECK(back.basis->r1_scalar == gain.basis->r1_scalar);
    REQUIRE(back.p1_reduced.has_value());
    CHECK((*back.p1_reduced - *gain.p1_reduced).norm() == 0.0);
}

TEST_CASE("reports serialize deterministically") {
    const Scenario sc = scenario_from_json(two_integrator_json(), "toy");
    const std::string a = synthesis_report(run_synthesize(sc, 1.0)).dump(2);
    const std::string b = synthesis_report(run_synthesize(sc, 1.0)).dump(2);
    CHECK(a == b);
}
