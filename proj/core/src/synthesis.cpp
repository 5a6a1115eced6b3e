#include "edge_consensus/synthesis.hpp"

#include "edge_consensus/errors.hpp"
#include "edge_consensus/numeric.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace edge_consensus {

namespace {

void require_positive_mu(double mu) {
    if (!(mu > 0.0)) {
        throw SynthesisError("mu must be positive, got " + std::to_string(mu));
    }
}

void require_weights(const LtiModel& model, const Matrix& q1, const Matrix& r1) {
    const int n = model.state_dim();
    const int m = model.input_dim();
    if (q1.rows() != n || q1.cols() != n) {
        throw InputError("Q1 must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (r1.rows() != m || r1.cols() != m) {
        throw InputError("R1 must be " + std::to_string(m) + "x" + std::to_string(m));
    }
}

void require_assumptions(const LtiModel& model) {
    const AssumptionReport rep = check_assumptions(model);
    if (!rep.a1_holds) {
        throw AssumptionViolation(
            "A1 fails: spectrum of A must lie in the closed left half plane with at least "
            "one eigenvalue on the imaginary axis");
    }
    if (!rep.a2_holds) {
        throw AssumptionViolation("A2 fails: (A, B) is not controllable");
    }
}

ControllerGain full_order_gain(const LtiModel& model, const Matrix& q1, const Matrix& r1,
                               double mu, DesignMode mode) {
    require_positive_mu(mu);
    require_weights(model, q1, r1);
    require_assumptions(model);
    if (!pbh_detectable(model.a, symmetric_sqrt(q1))) {
        throw NotDetectable("(Q1^{1/2}, A) is not detectable");
    }
    const RiccatiSolution sol = solve_care(model.a, model.b, q1, r1);

    ControllerGain gain;
    gain.k = sol.gain;
    gain.mu = mu;
    gain.mode = mode;
    gain.p1 = sol.p;
    gain.order = numeric_rank(sol.gain);
    gain.q1 = q1;
    gain.r1 = r1;
    return gain;
}

std::string fmt_complex(const Complex& c) {
    std::ostringstream os;
    os << c.real();
    if (c.imag() != 0.0) os << (c.imag() > 0 ? "+" : "") << c.imag() << "i";
    return os.str();
}

}  // namespace

std::string to_string(DesignMode mode) {
    switch (mode) {
        case DesignMode::GlobalFullOrder: return "global";
        case DesignMode::LocalFullOrder: return "local";
        case DesignMode::ReducedOrder: return "reduced";
        case DesignMode::FirstOrder: return "first_order";
    }
    return "unknown";
}

DesignMode design_mode_from_string(const std::string& name) {
    if (name == "global") return DesignMode::GlobalFullOrder;
    if (name == "local") return DesignMode::LocalFullOrder;
    if (name == "reduced") return DesignMode::ReducedOrder;
    if (name == "first_order") return DesignMode::FirstOrder;
    throw InputError("unknown design mode '" + name + "'");
}

ControllerGain design_global(const LtiModel& model, const LaplacianSpectrum& sp,
                             const Matrix& q1, const Matrix& r1, double mu) {
    require_positive_mu(mu);
    const double bound = 1.0 / sp.lambda_min;
    if (mu < bound * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "mu below 1/lambda_min(L) = " << bound;
        throw CouplingTooSmall(os.str());
    }
    ControllerGain gain = full_order_gain(model, q1, r1, mu, DesignMode::GlobalFullOrder);
    const double residual = global_riccati_residual(gain, model, sp);
    if (!(residual < 1e-8)) {
        throw ConvergenceFailure("structured global Riccati residual above 1e-8", residual);
    }
    return gain;
}

ControllerGain design_local(const LtiModel& model, const Matrix& q1, const Matrix& r1,
                            double mu) {
    return full_order_gain(model, q1, r1, mu, DesignMode::LocalFullOrder);
}

ControllerGain design_reduced(const LtiModel& model, const std::vector<Complex>& target_modes,
                              const ComplexMatrix& q1_tilde, const Matrix& r1, double mu) {
    require_positive_mu(mu);
    const int n = model.state_dim();
    const int m = model.input_dim();
    const int q = static_cast<int>(target_modes.size());
    if (q < 1 || q > n) {
        throw InputError("need between 1 and n target modes, got " + std::to_string(q));
    }
    if (r1.rows() != m || r1.cols() != m) {
        throw InputError("R1 must be " + std::to_string(m) + "x" + std::to_string(m));
    }
    if (q1_tilde.rows() != q || q1_tilde.cols() != q) {
        throw InputError("Q1~ must be q x q");
    }
    if ((q1_tilde - q1_tilde.adjoint()).norm() > 1e-10 * std::max(1.0, q1_tilde.norm())) {
        throw InputError("Q1~ must be Hermitian");
    }

    const double match_tol = 1e-7 * std::max(1.0, model.a.norm());
    const Spectrum a_eigs = eig(model.a);

    // Every target must be a simple eigenvalue of A, listed once, and complex
    // targets must come with their conjugate partners.
    for (int i = 0; i < q; ++i) {
        int multiplicity = 0;
        for (const auto& lambda : a_eigs) {
            if (std::abs(lambda - target_modes[i]) <= match_tol) ++multiplicity;
        }
        if (multiplicity == 0) {
            throw SynthesisError("target mode " + fmt_complex(target_modes[i]) +
                                 " is not an eigenvalue of A");
        }
        if (multiplicity > 1) {
            throw RepeatedTargetMode("target mode " + fmt_complex(target_modes[i]) +
                                     " is a repeated eigenvalue of A");
        }
        for (int j = i + 1; j < q; ++j) {
            if (std::abs(target_modes[i] - target_modes[j]) <= match_tol) {
                throw RepeatedTargetMode("target mode " + fmt_complex(target_modes[i]) +
                                         " listed more than once");
            }
        }
        if (std::abs(target_modes[i].imag()) > match_tol) {
            bool has_partner = false;
            for (int j = 0; j < q; ++j) {
                if (std::abs(std::conj(target_modes[i]) - target_modes[j]) <= match_tol) {
                    has_partner = true;
                    break;
                }
            }
            if (!has_partner) {
                throw ComplexGainResidual("complex target mode " +
                                          fmt_complex(target_modes[i]) +
                                          " selected without its conjugate partner");
            }
        }
    }

    // Left eigenvectors from A^T; conjugate partners share a vector so the
    // pairing is exact.
    Eigen::EigenSolver<Matrix> es(model.a.transpose());
    const ComplexVector at_vals = es.eigenvalues();
    const ComplexMatrix at_vecs = es.eigenvectors();

    ModeBasis basis;
    basis.lambda = ComplexVector(q);
    basis.w = ComplexMatrix(n, q);
    std::vector<char> filled(q, 0);
    for (int i = 0; i < q; ++i) {
        if (filled[i]) continue;
        // A^T w = conj(lambda) w for the left eigenvector of lambda.
        const Complex want = std::conj(target_modes[i]);
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < at_vals.size(); ++j) {
            const double dist = std::abs(at_vals(j) - want);
            if (dist < best_dist) {
                best_dist = dist;
                best = static_cast<int>(j);
            }
        }
        ComplexMatrix wm = at_vecs.col(best);
        normalize_column_phases(wm);
        basis.lambda(i) = std::conj(at_vals(best));
        basis.w.col(i) = wm.col(0) / wm.col(0).norm();
        filled[i] = 1;
        if (std::abs(target_modes[i].imag()) > match_tol) {
            for (int j = 0; j < q; ++j) {
                if (!filled[j] &&
                    std::abs(std::conj(target_modes[i]) - target_modes[j]) <= match_tol) {
                    basis.lambda(j) = std::conj(basis.lambda(i));
                    basis.w.col(j) = basis.w.col(i).conjugate();
                    filled[j] = 1;
                    break;
                }
            }
        }
    }

    basis.h = model.b.transpose().cast<Complex>() * basis.w;
    basis.r_tilde = basis.h.adjoint() * r1.cast<Complex>() * basis.h;

    // Realized full-size weight Q1 = W Q1~ W^*, which must come out real.
    const ComplexMatrix q1_full_c = basis.w * q1_tilde * basis.w.adjoint();
    if (q1_full_c.imag().norm() > 1e-9 * std::max(1.0, q1_full_c.norm())) {
        throw ComplexGainResidual("Q1~ is incompatible with the conjugate mode pairing");
    }
    Matrix q1_full = q1_full_c.real();
    q1_full = 0.5 * (q1_full + q1_full.transpose()).eval();

    if (!pbh_detectable(model.a, symmetric_sqrt(q1_full))) {
        throw NotDetectable(
            "(Q1^{1/2}, A) loses detectability under the selected target modes");
    }

    const ComplexMatrix lambda_mat = basis.lambda.asDiagonal();
    if (!pbh_stabilizable(lambda_mat, ComplexMatrix(hermitian_sqrt(basis.r_tilde)))) {
        throw NotStabilizable("selected modes cannot be actuated through B");
    }
    if (!pbh_detectable(lambda_mat, ComplexMatrix(hermitian_sqrt(q1_tilde)))) {
        throw NotDetectable("(Q1~^{1/2}, Lambda) is not detectable");
    }

    double reduced_residual = 0.0;
    const ComplexMatrix p1_tilde =
        solve_care_hermitian(lambda_mat, basis.r_tilde, q1_tilde, &reduced_residual);

    const ComplexMatrix p1_c = basis.w * p1_tilde * basis.w.adjoint();
    if (p1_c.imag().norm() > 1e-8 * std::max(1.0, p1_c.norm())) {
        throw ComplexGainResidual("reduced Riccati solution produced a complex gain");
    }
    Matrix p1 = p1_c.real();
    p1 = 0.5 * (p1 + p1.transpose()).eval();

    ControllerGain gain;
    gain.k = r1 * model.b.transpose() * p1;
    gain.mu = mu;
    gain.mode = DesignMode::ReducedOrder;
    gain.p1 = p1;
    gain.order = numeric_rank(gain.k);
    gain.q1 = q1_full;
    gain.r1 = r1;
    gain.basis = std::move(basis);
    gain.p1_reduced = p1_tilde;
    return gain;
}

ControllerGain design_first_order(const LtiModel& model, double q1_scalar, const Matrix& r1,
                                  double mu) {
    require_positive_mu(mu);
    if (!(q1_scalar > 0.0)) {
        throw SynthesisError("q1 must be positive");
    }
    const int n = model.state_dim();
    const int m = model.input_dim();
    if (r1.rows() != m || r1.cols() != m) {
        throw InputError("R1 must be " + std::to_string(m) + "x" + std::to_string(m));
    }

    const AssumptionReport rep = check_assumptions(model);
    if (!rep.a1_holds) {
        throw AssumptionViolation(
            "A1 fails: spectrum of A must lie in the closed left half plane with at least "
            "one eigenvalue on the imaginary axis");
    }
    const double zero_tol = 1e-9 * std::max(1.0, model.a.norm());
    int zero_count = 0;
    for (const auto& lambda : rep.spectrum_of_a) {
        if (std::abs(lambda) <= zero_tol) ++zero_count;
    }
    if (zero_count != 1) {
        throw ZeroNotSimple("A must have a simple zero eigenvalue, found " +
                            std::to_string(zero_count));
    }

    // Unit left null vector of A from the SVD of A^T.
    Eigen::JacobiSVD<Matrix> svd(model.a.transpose(), Eigen::ComputeFullV);
    Matrix nu_mat = svd.matrixV().rightCols(1);
    normalize_column_signs(nu_mat);
    const Vector nu = nu_mat.col(0);
    const double nu_residual = (model.a.transpose() * nu).norm();
    if (nu_residual > 1e-7 * std::max(1.0, model.a.norm())) {
        throw ConvergenceFailure("left null vector of A could not be isolated", nu_residual);
    }

    const double r1_scalar = nu.dot(model.b * r1 * model.b.transpose() * nu);
    const double r1_tol = 1e-12 * std::max(1.0, model.b.squaredNorm() * r1.norm());
    if (r1_scalar <= r1_tol) {
        throw UncontrollableZeroMode("B cannot actuate the zero mode of A (nu^T B R1 B^T nu = " +
                                     std::to_string(r1_scalar) + ")");
    }

    Matrix q1_full = q1_scalar * nu * nu.transpose();
    if (!pbh_detectable(model.a, symmetric_sqrt(q1_full))) {
        throw NotDetectable(
            "(Q1^{1/2}, A) is not detectable: A has other imaginary-axis modes the rank-one "
            "weight cannot see");
    }

    const double scale = std::sqrt(q1_scalar / r1_scalar);

    ControllerGain gain;
    gain.k = scale * r1 * model.b.transpose() * nu * nu.transpose();
    gain.mu = mu;
    gain.mode = DesignMode::FirstOrder;
    gain.p1 = scale * nu * nu.transpose();
    gain.order = numeric_rank(gain.k);
    gain.q1 = q1_full;
    gain.r1 = r1;

    ModeBasis basis;
    basis.lambda = ComplexVector::Zero(1);
    basis.w = nu.cast<Complex>();
    basis.h = model.b.transpose().cast<Complex>() * basis.w;
    basis.r_tilde = ComplexMatrix::Constant(1, 1, Complex(r1_scalar, 0.0));
    basis.nu = nu;
    basis.r1_scalar = r1_scalar;
    gain.basis = std::move(basis);
    gain.p1_reduced = ComplexMatrix::Constant(1, 1, Complex(scale, 0.0));
    return gain;
}

SpectrumReport predicted_spectrum(const ControllerGain& gain, const LaplacianSpectrum& sp,
                                  const LtiModel& model) {
    const int n = model.state_dim();
    const int n_agents = static_cast<int>(sp.eigenvalues.size());

    SpectrumReport report;
    report.mu = gain.mu;
    report.closed_form = gain.basis.has_value() && gain.p1_reduced.has_value();

    const Matrix bk = model.b * gain.k;

    // Residual spectrum of A with the targeted modes removed, for the
    // closed-form branch.
    Spectrum residual_modes;
    if (report.closed_form) {
        residual_modes = eig(model.a);
        for (Eigen::Index i = 0; i < gain.basis->lambda.size(); ++i) {
            int best = -1;
            double best_dist = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < residual_modes.size(); ++j) {
                const double dist = std::abs(residual_modes[j] - gain.basis->lambda(i));
                if (dist < best_dist) {
                    best_dist = dist;
                    best = static_cast<int>(j);
                }
            }
            if (best >= 0) residual_modes.erase(residual_modes.begin() + best);
        }
    }

    const auto modes_for = [&](double gamma) -> Spectrum {
        if (report.closed_form) {
            const ComplexMatrix xi =
                ComplexMatrix(gain.basis->lambda.asDiagonal()) -
                gain.mu * gamma * gain.basis->h.adjoint() * gain.r1.cast<Complex>() *
                    gain.basis->h * (*gain.p1_reduced);
            return eig(xi);
        }
        return eig(Matrix(model.a - gain.mu * gamma * bk));
    };

    for (int i = 0; i < n_agents; ++i) {
        const double gamma = (i == 0) ? 0.0 : sp.gamma(i - 1);
        Spectrum part = modes_for(gamma);
        report.mas_predicted.insert(report.mas_predicted.end(), part.begin(), part.end());
        if (i > 0) {
            report.edge_predicted.insert(report.edge_predicted.end(), part.begin(), part.end());
        }
    }
    if (report.closed_form) {
        for (const auto& lambda : residual_modes) {
            for (int r = 0; r < n_agents; ++r) report.mas_predicted.push_back(lambda);
            for (int r = 0; r + 1 < n_agents; ++r) report.edge_predicted.push_back(lambda);
        }
    }
    sort_spectrum(report.mas_predicted);
    sort_spectrum(report.edge_predicted);

    // Numerical counterparts on the assembled closed loops.
    const Matrix laplacian = sp.v2 * sp.gamma.asDiagonal() * sp.v2.transpose();
    const Matrix eye_agents = Matrix::Identity(n_agents, n_agents);
    report.mas_computed =
        eig(Matrix(kron(eye_agents, model.a) - gain.mu * kron(laplacian, bk)));
    const Matrix eye_edges = Matrix::Identity(n_agents - 1, n_agents - 1);
    report.edge_computed =
        eig(Matrix(kron(eye_edges, model.a) - gain.mu * kron(Matrix(sp.gamma.asDiagonal()), bk)));

    report.max_mismatch_mas = multiset_match_distance(report.mas_predicted, report.mas_computed);
    report.max_mismatch_edge =
        multiset_match_distance(report.edge_predicted, report.edge_computed);
    report.consensus_speed = -max_real_part(report.edge_predicted);
    return report;
}

double optimal_cost(const Matrix& p1, const Vector& z2_initial) {
    const int n = static_cast<int>(p1.rows());
    if (n == 0 || z2_initial.size() % n != 0) {
        throw InputError("z2 initial state dimension is not a multiple of the state dimension");
    }
    double cost = 0.0;
    for (Eigen::Index off = 0; off < z2_initial.size(); off += n) {
        const auto block = z2_initial.segment(off, n);
        cost += block.dot(p1 * block);
    }
    return cost;
}

Matrix implied_global_weighting(const ControllerGain& gain, const LtiModel& model,
                                const LaplacianSpectrum& sp) {
    const int blocks = static_cast<int>(sp.gamma.size());
    const Matrix eye = Matrix::Identity(blocks, blocks);
    const Matrix mu_gamma = gain.mu * Matrix(sp.gamma.asDiagonal());
    const Matrix s1 = model.b * gain.r1 * model.b.transpose();
    const Matrix q2 = gain.p1 * s1 * gain.p1;
    return kron(eye, gain.q1) + kron(Matrix(mu_gamma - eye), q2);
}

double global_riccati_residual(const ControllerGain& gain, const LtiModel& model,
                               const LaplacianSpectrum& sp) {
    const int blocks = static_cast<int>(sp.gamma.size());
    const Matrix eye = Matrix::Identity(blocks, blocks);
    const Matrix mu_gamma = gain.mu * Matrix(sp.gamma.asDiagonal());

    const Matrix s1 = model.b * gain.r1 * model.b.transpose();
    const Matrix a_big = kron(eye, model.a);
    const Matrix q_big = implied_global_weighting(gain, model, sp);
    const Matrix s_big = kron(mu_gamma, s1);
    const Matrix p_big = kron(eye, gain.p1);

    return (p_big * a_big + a_big.transpose() * p_big + q_big - p_big * s_big * p_big).norm();
}

double f2_structure_error(const ControllerGain& gain, const LtiModel& model,
                          const LaplacianSpectrum& sp) {
    const int blocks = static_cast<int>(sp.gamma.size());
    const Matrix eye = Matrix::Identity(blocks, blocks);
    const Matrix mu_gamma = gain.mu * Matrix(sp.gamma.asDiagonal());

    const Matrix r_inv_big = kron(mu_gamma, gain.r1);
    const Matrix b_big = kron(eye, model.b);
    const Matrix p_big = kron(eye, gain.p1);
    const Matrix f2_assembled = r_inv_big * b_big.transpose() * p_big;
    const Matrix f2_closed = kron(mu_gamma, Matrix(gain.r1 * model.b.transpose() * gain.p1));
    return (f2_assembled - f2_closed).norm();
}

}  // namespace edge_consensus
