#include "edge_consensus/simulation.hpp"

#include "edge_consensus/errors.hpp"
#include "edge_consensus/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace edge_consensus {

namespace {

double spectral_radius(const Matrix& m) {
    double rho = 0.0;
    for (const auto& lambda : eig(m)) {
        rho = std::max(rho, std::abs(lambda));
    }
    return rho;
}

void check_step(const Matrix& system, double horizon, double step) {
    if (!(step > 0.0)) {
        throw SimulationError("step must be positive");
    }
    if (!(horizon >= step)) {
        throw SimulationError("horizon must be at least one step");
    }
    const double scaled = spectral_radius(system) * step;
    if (scaled > 2.5) {
        throw StepTooLarge("spectral radius times step is " + std::to_string(scaled) +
                           ", above the RK4 stability heuristic 2.5");
    }
}

}  // namespace

Matrix closed_loop_matrix(const GraphMatrices& gm, const LtiModel& model,
                          const ControllerGain& gain) {
    const Matrix eye = Matrix::Identity(gm.node_count, gm.node_count);
    return kron(eye, model.a) - gain.mu * kron(gm.laplacian, Matrix(model.b * gain.k));
}

Matrix edge_closed_loop_matrix(const LaplacianSpectrum& sp, const LtiModel& model,
                               const ControllerGain& gain) {
    const int blocks = static_cast<int>(sp.gamma.size());
    const Matrix eye = Matrix::Identity(blocks, blocks);
    return kron(eye, model.a) -
           gain.mu * kron(Matrix(sp.gamma.asDiagonal()), Matrix(model.b * gain.k));
}

Trajectory integrate_linear(const Matrix& system, const Vector& x0, double horizon, double step,
                            int record_every) {
    if (system.rows() != system.cols() || system.rows() != x0.size()) {
        throw InputError("system/state dimension mismatch");
    }
    if (record_every < 1) {
        throw InputError("record_every must be at least 1");
    }
    check_step(system, horizon, step);

    const long n_steps = std::max<long>(1, std::lround(horizon / step));
    const long n_samples = n_steps / record_every + 1;

    Trajectory traj;
    traj.settings = {step, horizon, record_every};
    traj.times = Vector(n_samples);
    traj.states = Matrix(x0.size(), n_samples);
    traj.times(0) = 0.0;
    traj.states.col(0) = x0;

    Vector x = x0;
    Vector k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size());
    long sample = 1;
    for (long i = 1; i <= n_steps; ++i) {
        k1.noalias() = system * x;
        k2.noalias() = system * (x + 0.5 * step * k1);
        k3.noalias() = system * (x + 0.5 * step * k2);
        k4.noalias() = system * (x + step * k3);
        x += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (i % record_every == 0 && sample < n_samples) {
            traj.times(sample) = i * step;
            traj.states.col(sample) = x;
            ++sample;
        }
    }
    traj.times.conservativeResize(sample);
    traj.states.conservativeResize(Eigen::NoChange, sample);
    return traj;
}

Trajectory simulate_closed_loop(const GraphMatrices& gm, const LtiModel& model,
                                const ControllerGain& gain, const Vector& x0, double horizon,
                                double step, int record_every) {
    if (x0.size() != static_cast<Eigen::Index>(gm.node_count) * model.state_dim()) {
        throw InputError("x0 must have dimension N*n = " +
                         std::to_string(gm.node_count * model.state_dim()));
    }
    Trajectory traj =
        integrate_linear(closed_loop_matrix(gm, model, gain), x0, horizon, step, record_every);
    traj.gain = gain;
    if (model.c) {
        const int n = model.state_dim();
        Matrix y(gm.node_count, traj.samples());
        for (int agent = 0; agent < gm.node_count; ++agent) {
            y.row(agent) = *model.c * traj.states.middleRows(agent * n, n);
        }
        traj.outputs = std::move(y);
    }
    return traj;
}

DisagreementTrace disagreement(const Trajectory& traj, const GraphMatrices& gm) {
    const int dim = static_cast<int>(traj.states.rows());
    if (dim % gm.node_count != 0) {
        throw InputError("trajectory dimension is not a multiple of the agent count");
    }
    const int n = dim / gm.node_count;
    const Matrix projector = kron(gm.incidence.transpose(), Matrix::Identity(n, n));

    DisagreementTrace trace;
    trace.times = traj.times;
    trace.edge_states = projector * traj.states;
    trace.max_pairwise = Vector::Zero(traj.samples());
    for (int s = 0; s < traj.samples(); ++s) {
        double worst = 0.0;
        for (int e = 0; e < gm.edge_count; ++e) {
            worst = std::max(worst,
                             trace.edge_states.col(s).segment(e * n, n).cwiseAbs().maxCoeff());
        }
        trace.max_pairwise(s) = worst;
    }
    trace.fitted_rate = fit_decay_rate(trace.times, trace.max_pairwise);
    return trace;
}

Vector output_max_pairwise(const Trajectory& traj, const GraphMatrices& gm) {
    if (!traj.outputs) {
        throw InputError("trajectory has no outputs");
    }
    Vector out = Vector::Zero(traj.samples());
    for (int s = 0; s < traj.samples(); ++s) {
        double worst = 0.0;
        for (int e = 0; e < gm.edge_count; ++e) {
            // Edge endpoints are recoverable from the signed incidence column.
            int lo = -1, hi = -1;
            for (int v = 0; v < gm.node_count; ++v) {
                if (gm.incidence(v, e) > 0.0) lo = v;
                if (gm.incidence(v, e) < 0.0) hi = v;
            }
            worst = std::max(worst, std::abs((*traj.outputs)(lo, s) - (*traj.outputs)(hi, s)));
        }
        out(s) = worst;
    }
    return out;
}

std::optional<double> fit_decay_rate(const Vector& times, const Vector& series) {
    if (times.size() != series.size() || times.size() < 2) return std::nullopt;
    const double t_begin = 0.5 * times(times.size() - 1);
    double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
    long count = 0;
    for (Eigen::Index i = 0; i < times.size(); ++i) {
        if (times(i) < t_begin || series(i) <= 1e-12) continue;
        const double y = std::log(series(i));
        sum_t += times(i);
        sum_y += y;
        sum_tt += times(i) * times(i);
        sum_ty += times(i) * y;
        ++count;
    }
    if (count < 3) return std::nullopt;
    const double denom = count * sum_tt - sum_t * sum_t;
    if (denom <= 0.0) return std::nullopt;
    const double slope = (count * sum_ty - sum_t * sum_y) / denom;
    return -slope;
}

std::optional<double> time_to_threshold(const Vector& times, const Vector& series,
                                        double threshold) {
    Eigen::Index last_above = -1;
    for (Eigen::Index i = 0; i < series.size(); ++i) {
        if (series(i) >= threshold) last_above = i;
    }
    if (last_above < 0) return 0.0;
    if (last_above + 1 >= times.size()) return std::nullopt;
    return times(last_above + 1);
}

Trajectory edge_state_trajectory(const Trajectory& traj, const LaplacianSpectrum& sp,
                                 int state_dim) {
    const Matrix projector = kron(
        Matrix(sp.gamma.cwiseSqrt().asDiagonal() * sp.v2.transpose()),
        Matrix::Identity(state_dim, state_dim));
    Trajectory out;
    out.times = traj.times;
    out.states = projector * traj.states;
    out.settings = traj.settings;
    out.gain = traj.gain;
    return out;
}

Matrix cost_weight_matrix(const Vector& gamma, const Matrix& q1, const Matrix& r1,
                          const ControllerGain& gain) {
    const int blocks = static_cast<int>(gamma.size());
    const Matrix eye = Matrix::Identity(blocks, blocks);
    const Matrix mu_gamma = gain.mu * Matrix(gamma.asDiagonal());

    // Q2 = P1 B R1 B^T P1 written through the gain, K^T R1^{-1} K.
    const Matrix r1_inv = gain.r1.inverse();
    const Matrix q2 = gain.k.transpose() * r1_inv * gain.k;

    // With w2 = -(mu Gamma ⊗ K) z2 and R~ = (mu Gamma)^{-1} ⊗ R1^{-1}, the
    // input term collapses to mu Gamma ⊗ (K^T R1^{-1} K).
    return kron(eye, q1) + kron(Matrix(mu_gamma - eye), q2) + kron(mu_gamma, q2);
}

double integrate_cost(const Trajectory& edge_traj, const Vector& gamma, const Matrix& q1,
                      const Matrix& r1, const ControllerGain& gain) {
    const int samples = edge_traj.samples();
    if (samples < 3) {
        throw InputError("need at least three samples to integrate the cost");
    }
    const double dt = edge_traj.times(1) - edge_traj.times(0);
    for (Eigen::Index i = 1; i + 1 < edge_traj.times.size(); ++i) {
        if (std::abs((edge_traj.times(i + 1) - edge_traj.times(i)) - dt) > 1e-9 * dt) {
            throw InputError("cost integration requires uniform sampling");
        }
    }

    const Matrix weight = cost_weight_matrix(gamma, q1, r1, gain);
    Vector integrand(samples);
    for (int s = 0; s < samples; ++s) {
        integrand(s) = edge_traj.states.col(s).dot(weight * edge_traj.states.col(s));
    }

    // Composite Simpson over pairs of intervals, trapezoid on a trailing odd one.
    double total = 0.0;
    int s = 0;
    for (; s + 2 < samples; s += 2) {
        total += dt / 3.0 * (integrand(s) + 4.0 * integrand(s + 1) + integrand(s + 2));
    }
    if (s + 1 < samples) {
        total += 0.5 * dt * (integrand(s) + integrand(s + 1));
    }

    if (integrand(samples - 1) > 1e-6 * std::max(total, 1e-30)) {
        throw HorizonTooShort("cost integrand has not decayed below 1e-6 of the accumulated "
                              "value by the end of the horizon");
    }
    return total;
}

double closed_loop_cost(const Matrix& edge_closed_loop, const Vector& z2_initial,
                        const Matrix& cost_matrix, double horizon, double step) {
    if (edge_closed_loop.rows() != z2_initial.size() ||
        cost_matrix.rows() != z2_initial.size()) {
        throw InputError("dimension mismatch in cost integration");
    }
    check_step(edge_closed_loop, horizon, step);

    const long n_steps = std::max<long>(1, std::lround(horizon / step));
    Vector z = z2_initial;
    double cost = 0.0;
    Vector k1(z.size()), k2(z.size()), k3(z.size()), k4(z.size());
    const auto f = [&](const Vector& state) { return state.dot(cost_matrix * state); };
    for (long i = 0; i < n_steps; ++i) {
        k1.noalias() = edge_closed_loop * z;
        const double c1 = f(z);
        Vector z2 = z + 0.5 * step * k1;
        k2.noalias() = edge_closed_loop * z2;
        const double c2 = f(z2);
        Vector z3 = z + 0.5 * step * k2;
        k3.noalias() = edge_closed_loop * z3;
        const double c3 = f(z3);
        Vector z4 = z + step * k3;
        k4.noalias() = edge_closed_loop * z4;
        const double c4 = f(z4);
        z += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        cost += (step / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
    }
    const double tail = f(z);
    if (tail > 1e-6 * std::max(cost, 1e-30)) {
        throw HorizonTooShort("cost integrand has not decayed below 1e-6 of the accumulated "
                              "value by the end of the horizon");
    }
    return cost;
}

}  // namespace edge_consensus
