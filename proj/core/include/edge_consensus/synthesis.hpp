#pragma once

#include "edge_consensus/graph_algebra.hpp"
#include "edge_consensus/linear_systems.hpp"
#include "edge_consensus/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace edge_consensus {

enum class DesignMode { GlobalFullOrder, LocalFullOrder, ReducedOrder, FirstOrder };

std::string to_string(DesignMode mode);
DesignMode design_mode_from_string(const std::string& name);

/// Targeted eigenmodes of A and the derived quantities of the reduced designs:
/// columns of w are left eigenvectors (A^T w_i = conj(lambda_i) w_i), h = B^T W,
/// r_tilde = W^* B R1 B^T W. nu / r1_scalar are the first-order specials.
struct ModeBasis {
    ComplexVector lambda;
    ComplexMatrix w;
    ComplexMatrix h;
    ComplexMatrix r_tilde;
    Vector nu;
    double r1_scalar = 0.0;
};

struct ControllerGain {
    Matrix k;         // m x n coupling matrix
    double mu = 0.0;  // coupling strength
    DesignMode mode = DesignMode::LocalFullOrder;
    Matrix p1;        // Riccati solution behind K
    int order = 0;    // rank of K
    Matrix q1;        // effective state weight (W Q1~ W^* for mode-targeted designs)
    Matrix r1;
    std::optional<ModeBasis> basis;           // ReducedOrder / FirstOrder only
    std::optional<ComplexMatrix> p1_reduced;  // q x q reduced Riccati solution
};

/// Closed-loop eigenvalue prediction next to the numerically computed multisets.
struct SpectrumReport {
    Spectrum mas_predicted;
    Spectrum edge_predicted;
    Spectrum mas_computed;
    Spectrum edge_computed;
    double max_mismatch_mas = 0.0;
    double max_mismatch_edge = 0.0;
    double consensus_speed = 0.0;  // decay rate of the slowest predicted edge mode
    bool closed_form = false;      // mode-targeted formula vs per-eigenvalue eigensolve
    double mu = 0.0;
};

/// LQR consensus design with the structured global performance index; requires
/// mu >= 1/lambda_min(L).
ControllerGain design_global(const LtiModel& model, const LaplacianSpectrum& sp,
                             const Matrix& q1, const Matrix& r1, double mu);

/// Per-edge LQR design; any mu > 0 is admissible.
ControllerGain design_local(const LtiModel& model, const Matrix& q1, const Matrix& r1,
                            double mu);

/// Mode-targeted design: acts on the selected simple eigenvalues of A through
/// their left eigenvectors, producing a gain of rank at most q. Complex modes
/// must be selected in conjugate pairs so the gain stays real.
ControllerGain design_reduced(const LtiModel& model, const std::vector<Complex>& target_modes,
                              const ComplexMatrix& q1_tilde, const Matrix& r1, double mu);

/// Rank-one gain acting on a simple zero eigenvalue of A.
ControllerGain design_first_order(const LtiModel& model, double q1_scalar, const Matrix& r1,
                                  double mu);

SpectrumReport predicted_spectrum(const ControllerGain& gain, const LaplacianSpectrum& sp,
                                  const LtiModel& model);

/// Sum of per-block quadratic forms z2_i(0)^T P1 z2_i(0); the minimum of the
/// structured performance index, independent of the graph.
double optimal_cost(const Matrix& p1, const Vector& z2_initial);

/// The state weighting the structured design implicitly optimizes:
/// I ⊗ Q1 + (mu Gamma - I) ⊗ Q2 with Q2 = P1 B R1 B^T P1. PSD whenever
/// mu >= 1/lambda_min(L).
Matrix implied_global_weighting(const ControllerGain& gain, const LtiModel& model,
                                const LaplacianSpectrum& sp);

/// Frobenius residual of the structured global Riccati equation under
/// P = I ⊗ P1 with the implied weightings.
double global_riccati_residual(const ControllerGain& gain, const LtiModel& model,
                               const LaplacianSpectrum& sp);

/// Distance between the assembled stabilizing feedback gain and its
/// closed form mu*Gamma ⊗ (R1 B^T P1).
double f2_structure_error(const ControllerGain& gain, const LtiModel& model,
                          const LaplacianSpectrum& sp);

}  // namespace edge_consensus
