#pragma once

#include "edge_consensus/edge_dynamics.hpp"
#include "edge_consensus/graph_algebra.hpp"
#include "edge_consensus/linear_systems.hpp"
#include "edge_consensus/synthesis.hpp"
#include "edge_consensus/types.hpp"

#include <optional>

namespace edge_consensus {

struct IntegratorSettings {
    double step = 1e-3;
    double horizon = 10.0;
    int record_every = 1;
};

/// Fixed-step trajectory; one column of `states` per recorded sample.
struct Trajectory {
    Vector times;
    Matrix states;
    std::optional<Matrix> outputs;  // one row per agent when the model has C
    IntegratorSettings settings;
    std::optional<ControllerGain> gain;  // the feedback the loop was closed with

    int samples() const { return static_cast<int>(times.size()); }
};

/// Edge-wise disagreement along a trajectory and the decay rate fitted on the
/// tail half of the horizon.
struct DisagreementTrace {
    Vector times;
    Matrix edge_states;   // (M n) x samples
    Vector max_pairwise;  // per-sample max over edges of the block infinity norm
    std::optional<double> fitted_rate;
};

/// Closed-loop matrix I_N ⊗ A - mu L ⊗ (B K).
Matrix closed_loop_matrix(const GraphMatrices& gm, const LtiModel& model,
                          const ControllerGain& gain);

/// Transformed edge closed loop I_{N-1} ⊗ A - mu Gamma ⊗ (B K).
Matrix edge_closed_loop_matrix(const LaplacianSpectrum& sp, const LtiModel& model,
                               const ControllerGain& gain);

/// Classical fixed-step RK4 on x' = M x. Throws StepTooLarge when the spectral
/// radius of M times the step exceeds the RK4 stability heuristic (2.5).
Trajectory integrate_linear(const Matrix& system, const Vector& x0, double horizon, double step,
                            int record_every = 1);

/// Simulates x' = (I ⊗ A - mu L ⊗ B K) x and attaches outputs when C is set.
Trajectory simulate_closed_loop(const GraphMatrices& gm, const LtiModel& model,
                                const ControllerGain& gain, const Vector& x0, double horizon,
                                double step, int record_every = 1);

DisagreementTrace disagreement(const Trajectory& traj, const GraphMatrices& gm);

/// Per-sample max over edges of |y_i - y_j| for trajectories with outputs.
Vector output_max_pairwise(const Trajectory& traj, const GraphMatrices& gm);

/// Least-squares exponential decay rate of a positive series over the tail
/// half of the horizon; nullopt when fewer than three samples qualify.
std::optional<double> fit_decay_rate(const Vector& times, const Vector& series);

/// First time after which the series stays below the threshold; nullopt when
/// it never does, 0 when it always is.
std::optional<double> time_to_threshold(const Vector& times, const Vector& series,
                                        double threshold);

/// Projects an agent-state trajectory to the transformed edge coordinates
/// z2 = (Gamma^{1/2} V2^T ⊗ I_n) x.
Trajectory edge_state_trajectory(const Trajectory& traj, const LaplacianSpectrum& sp,
                                 int state_dim);

/// Quadratic form defining the running cost along the closed-loop edge
/// trajectory: z2^T [Q~ + F2^T R~ F2] z2.
Matrix cost_weight_matrix(const Vector& gamma, const Matrix& q1, const Matrix& r1,
                          const ControllerGain& gain);

/// Composite-Simpson integral of the performance index along a stored edge
/// trajectory. Throws HorizonTooShort when the integrand has not decayed to
/// 1e-6 of the accumulated value by the final sample.
double integrate_cost(const Trajectory& edge_traj, const Vector& gamma, const Matrix& q1,
                      const Matrix& r1, const ControllerGain& gain);

/// Storage-free variant for long horizons: integrates z' = M z with the cost
/// as an augmented RK4 state.
double closed_loop_cost(const Matrix& edge_closed_loop, const Vector& z2_initial,
                        const Matrix& cost_matrix, double horizon, double step);

}  // namespace edge_consensus
