#include "edge_consensus/scenario.hpp"

#include "edge_consensus/errors.hpp"
#include "edge_consensus/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace edge_consensus {

namespace {

// Uniform double in [-1, 1) built from the raw engine output so the stream is
// identical across standard library implementations.
double uniform_pm1(std::mt19937_64& gen) {
    const double u01 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return 2.0 * u01 - 1.0;
}

}  // namespace

Vector initial_state(const Scenario& scenario) {
    const int n = scenario.model.state_dim();
    const Eigen::Index dim = static_cast<Eigen::Index>(scenario.graph.node_count) * n;
    if (scenario.simulation.x0) {
        if (scenario.simulation.x0->size() != dim) {
            throw InputError("x0 must have dimension N*n = " + std::to_string(dim));
        }
        return *scenario.simulation.x0;
    }
    if (!scenario.simulation.seed) {
        throw InputError("simulation block needs either x0 or seed");
    }
    Vector scale = scenario.simulation.x0_scale;
    if (scale.size() == 0) {
        scale = Vector::Ones(n);
    } else if (scale.size() == 1) {
        scale = Vector::Constant(n, scale(0));
    } else if (scale.size() != n) {
        throw InputError("x0_scale must be a scalar or have one entry per state component");
    }
    std::mt19937_64 gen(*scenario.simulation.seed);
    Vector x0(dim);
    for (int agent = 0; agent < scenario.graph.node_count; ++agent) {
        for (int k = 0; k < n; ++k) {
            x0(agent * n + k) = scale(k) * uniform_pm1(gen);
        }
    }
    return x0;
}

ControllerGain design_from_spec(const LtiModel& model, const LaplacianSpectrum& sp,
                                const DesignSpec& design, double mu) {
    switch (design.mode) {
        case DesignMode::GlobalFullOrder:
            return design_global(model, sp, design.q1, design.r1, mu);
        case DesignMode::LocalFullOrder:
            return design_local(model, design.q1, design.r1, mu);
        case DesignMode::ReducedOrder:
            return design_reduced(model, design.target_modes, design.q1_tilde, design.r1, mu);
        case DesignMode::FirstOrder:
            return design_first_order(model, design.q1_scalar, design.r1, mu);
    }
    throw InputError("unknown design mode");
}

SynthesisOutcome run_synthesize(const Scenario& scenario, double mu) {
    const GraphMatrices gm = compute_matrices(scenario.graph);
    const LaplacianSpectrum sp = spectrum(gm);

    SynthesisOutcome outcome;
    outcome.mu = mu;
    outcome.assumptions = check_assumptions(scenario.model);
    outcome.gain = design_from_spec(scenario.model, sp, scenario.design, mu);
    outcome.spectrum = predicted_spectrum(outcome.gain, sp, scenario.model);
    outcome.mu_lower_bound_global = 1.0 / sp.lambda_min;
    outcome.mu_meets_global_bound = mu >= outcome.mu_lower_bound_global * (1.0 - 1e-12);
    return outcome;
}

SimulationOutcome run_simulate(const Scenario& scenario, double mu) {
    SimulationOutcome outcome;
    outcome.synthesis = run_synthesize(scenario, mu);
    outcome.threshold = scenario.simulation.threshold;

    const GraphMatrices gm = compute_matrices(scenario.graph);
    const Vector x0 = initial_state(scenario);
    outcome.trajectory = simulate_closed_loop(gm, scenario.model, outcome.synthesis.gain, x0,
                                              scenario.simulation.horizon,
                                              scenario.simulation.step,
                                              scenario.simulation.record_every);
    outcome.state_disagreement = disagreement(outcome.trajectory, gm);

    const Vector* consensus_series = &outcome.state_disagreement.max_pairwise;
    if (outcome.trajectory.outputs) {
        outcome.output_disagreement = output_max_pairwise(outcome.trajectory, gm);
        consensus_series = &*outcome.output_disagreement;
    }
    outcome.time_to_consensus =
        time_to_threshold(outcome.trajectory.times, *consensus_series, outcome.threshold);
    return outcome;
}

VerificationOutcome run_verify(const Scenario& scenario, double mu,
                               const std::optional<ControllerGain>& gain_override) {
    const GraphMatrices gm = compute_matrices(scenario.graph);
    const LaplacianSpectrum sp = spectrum(gm);
    const LtiModel& model = scenario.model;
    const int n = model.state_dim();

    VerificationOutcome outcome;
    outcome.mu = mu;
    ControllerGain gain =
        gain_override ? *gain_override : design_from_spec(model, sp, scenario.design, mu);
    gain.mu = mu;

    const auto add = [&](const std::string& name, double value, double tol) {
        outcome.certificates.push_back(Certificate{name, value < tol, value, tol});
    };

    // The reported gain must be the Riccati gain of its own certificate data.
    add("gain_consistency",
        (gain.k - gain.r1 * model.b.transpose() * gain.p1).norm(),
        1e-9 * std::max(1.0, gain.k.norm()));

    // Local Riccati residual behind the gain.
    {
        const Matrix s1 = model.b * gain.r1 * model.b.transpose();
        const double residual =
            (gain.p1 * model.a + model.a.transpose() * gain.p1 + gain.q1 -
             gain.p1 * s1 * gain.p1)
                .norm();
        add("local_riccati_residual", residual, 1e-9 * std::max(1.0, gain.q1.norm()));
    }
    add("global_riccati_residual", global_riccati_residual(gain, model, sp), 1e-8);
    add("f2_structure", f2_structure_error(gain, model, sp), 1e-9);

    const SpectrumReport report = predicted_spectrum(gain, sp, model);
    add("spectrum_match", report.max_mismatch_mas, 1e-7);

    const EdgeTransform tf = build_transform(gm, sp);
    {
        const Matrix u = tf.u();
        add("transform_orthogonality",
            (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).norm(), 1e-10);
    }
    {
        // F (U^T E^T) = mu U^T E^T L with F = diag(0, mu Gamma).
        const int m = gm.edge_count;
        Matrix f = Matrix::Zero(m, m);
        f.bottomRightCorner(sp.gamma.size(), sp.gamma.size()) =
            mu * Matrix(sp.gamma.asDiagonal());
        const Matrix ut_et = tf.u().transpose() * gm.incidence.transpose();
        add("equivalence_identity", (f * ut_et - mu * ut_et * gm.laplacian).norm(), 1e-9);
    }

    // Trajectory-level checks share one closed-loop simulation.
    const Vector x0 = initial_state(scenario);
    const Trajectory traj =
        simulate_closed_loop(gm, model, gain, x0, scenario.simulation.horizon,
                             scenario.simulation.step, scenario.simulation.record_every);
    {
        double worst = 0.0;
        if (!tf.is_tree) {
            const Matrix z1_projector =
                kron(Matrix(tf.u1.transpose() * gm.incidence.transpose()),
                     Matrix::Identity(n, n));
            const Matrix z1 = z1_projector * traj.states;
            worst = z1.cwiseAbs().maxCoeff();
        }
        add("z1_invariant", worst, 1e-9);
    }

    // Cost identity, integrated block by block so stiff fast modes do not
    // force a tiny step over the slow blocks' long horizons.
    {
        const EdgeDynamics ed = build_edge_dynamics(gm, model);
        const Vector z2_0 = project_initial_state(tf, ed, x0).second;
        const double expected = optimal_cost(gain.p1, z2_0);

        const Matrix r1_inv = gain.r1.inverse();
        const Matrix q2 = gain.k.transpose() * r1_inv * gain.k;
        double integrated = 0.0;
        for (Eigen::Index i = 0; i < sp.gamma.size(); ++i) {
            const double mu_gamma = mu * sp.gamma(i);
            const Matrix block = model.a - mu_gamma * model.b * gain.k;
            const Matrix weight = gain.q1 + (2.0 * mu_gamma - 1.0) * q2;
            const Vector z_block = z2_0.segment(i * n, n);
            if (z_block.norm() == 0.0) continue;

            double slowest = std::numeric_limits<double>::infinity();
            double rho = 0.0;
            for (const auto& lambda : eig(block)) {
                slowest = std::min(slowest, -lambda.real());
                rho = std::max(rho, std::abs(lambda));
            }
            const double horizon = 9.0 / slowest;
            const double step = std::min(0.25 / rho, horizon / 64.0);
            integrated += closed_loop_cost(block, z_block, weight, horizon, step);
        }
        const double drift =
            std::abs(integrated - expected) / std::max(expected, 1e-30);
        add("cost_identity", expected == 0.0 && integrated == 0.0 ? 0.0 : drift, 5e-3);
    }

    if (tf.is_tree) {
        add("tree_fast_path",
            (gm.lbar - Matrix::Identity(gm.edge_count, gm.edge_count)).norm(), 1e-8);
    }

    outcome.all_pass = std::all_of(outcome.certificates.begin(), outcome.certificates.end(),
                                   [](const Certificate& c) { return c.pass; });
    return outcome;
}

}  // namespace edge_consensus
