#pragma once

#include "edge_consensus/edge_dynamics.hpp"
#include "edge_consensus/graph_algebra.hpp"
#include "edge_consensus/linear_systems.hpp"
#include "edge_consensus/simulation.hpp"
#include "edge_consensus/synthesis.hpp"
#include "edge_consensus/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace edge_consensus {

/// Design request as it appears in a scenario file. Weights are stored in
/// whichever shape the selected mode consumes.
struct DesignSpec {
    DesignMode mode = DesignMode::FirstOrder;
    std::vector<double> mu_values;      // one entry per requested coupling strength
    Matrix q1;                          // global / local
    ComplexMatrix q1_tilde;             // reduced
    double q1_scalar = 1.0;             // first_order
    Matrix r1;
    std::vector<Complex> target_modes;  // reduced
};

struct SimulationSpec {
    std::optional<Vector> x0;
    std::optional<std::uint64_t> seed;
    Vector x0_scale;  // per-state-component amplitude for seeded starts
    double horizon = 10.0;
    double step = 1e-3;
    int record_every = 1;
    double threshold = 1e-3;
};

struct OutputSpec {
    std::string directory = ".";
    bool write_json = true;
    bool write_csv = true;
};

struct Scenario {
    std::string name = "scenario";
    Graph graph;
    LtiModel model;
    DesignSpec design;
    SimulationSpec simulation;
    OutputSpec outputs;
};

/// Deterministic initial state: either the explicit x0 or a seeded uniform
/// perturbation with per-component amplitudes from x0_scale.
Vector initial_state(const Scenario& scenario);

/// Dispatches to the design routine selected by the request.
ControllerGain design_from_spec(const LtiModel& model, const LaplacianSpectrum& sp,
                                const DesignSpec& design, double mu);

struct SynthesisOutcome {
    double mu = 0.0;
    AssumptionReport assumptions;
    ControllerGain gain;
    SpectrumReport spectrum;
    double mu_lower_bound_global = 0.0;  // 1/lambda_min(L)
    bool mu_meets_global_bound = false;
};

SynthesisOutcome run_synthesize(const Scenario& scenario, double mu);

struct SimulationOutcome {
    SynthesisOutcome synthesis;
    Trajectory trajectory;
    DisagreementTrace state_disagreement;
    std::optional<Vector> output_disagreement;
    std::optional<double> time_to_consensus;  // nullopt: not reached in the horizon
    double threshold = 0.0;
};

SimulationOutcome run_simulate(const Scenario& scenario, double mu);

struct Certificate {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
};

struct VerificationOutcome {
    double mu = 0.0;
    std::vector<Certificate> certificates;
    bool all_pass = false;
};

/// Runs the full certificate suite. When a gain override is supplied it is
/// checked in place of a freshly designed one.
VerificationOutcome run_verify(const Scenario& scenario, double mu,
                               const std::optional<ControllerGain>& gain_override = {});

}  // namespace edge_consensus
