#include "edge_consensus/edge_dynamics.hpp"

#include "edge_consensus/errors.hpp"
#include "edge_consensus/numeric.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace edge_consensus {

EdgeDynamics build_edge_dynamics(const GraphMatrices& gm, const LtiModel& model) {
    if (!gm.connected) {
        throw DisconnectedGraph("graph not connected");
    }
    const int n = model.state_dim();
    EdgeDynamics ed;
    ed.lbar_kron_a = kron(gm.lbar, model.a);
    ed.input_map = kron(Matrix::Identity(gm.edge_count, gm.edge_count), model.b);
    ed.z_projector = kron(gm.incidence.transpose(), Matrix::Identity(n, n));
    ed.edge_state_dim = gm.edge_count * n;
    return ed;
}

EdgeTransform build_transform(const GraphMatrices& gm, const LaplacianSpectrum& sp) {
    if (!gm.connected) {
        throw DisconnectedGraph("graph not connected");
    }
    const int n = gm.node_count;
    const int m = gm.edge_count;

    EdgeTransform tf;
    tf.gamma = sp.gamma;
    tf.is_tree = (m == n - 1);
    tf.u2 = gm.incidence.transpose() * sp.v2 * sp.gamma.cwiseSqrt().cwiseInverse().asDiagonal();

    // Cycle space = kernel of E, taken from the right singular vectors.
    const int n_cycles = m - (n - 1);
    if (n_cycles == 0) {
        tf.u1 = Matrix(m, 0);
    } else {
        Eigen::JacobiSVD<Matrix> svd(gm.incidence, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double cutoff = 1e-9 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
        int rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) >= cutoff) ++rank;
        }
        if (rank != n - 1) {
            throw DisconnectedGraph("incidence rank " + std::to_string(rank) +
                                    " does not match a connected graph on " + std::to_string(n) +
                                    " nodes");
        }
        tf.u1 = svd.matrixV().rightCols(n_cycles);
        normalize_column_signs(tf.u1);
    }
    return tf;
}

ReducedEdgeSystem build_reduced_system(const GraphMatrices& gm, const LaplacianSpectrum& sp,
                                       const EdgeTransform& tf, const LtiModel& model) {
    const int n = model.state_dim();
    const Matrix eye_blocks = Matrix::Identity(gm.node_count - 1, gm.node_count - 1);

    ReducedEdgeSystem rs;
    rs.a_block = kron(eye_blocks, model.a);
    rs.b_block = kron(eye_blocks, model.b);
    rs.z2_projector =
        kron(Matrix(tf.u2.transpose() * gm.incidence.transpose()), Matrix::Identity(n, n));
    return rs;
}

std::pair<Vector, Vector> project_initial_state(const EdgeTransform& tf, const EdgeDynamics& ed,
                                                const Vector& x0) {
    if (x0.size() != ed.z_projector.cols()) {
        throw InputError("x0 has dimension " + std::to_string(x0.size()) + ", expected " +
                         std::to_string(ed.z_projector.cols()));
    }
    const int m = static_cast<int>(tf.u2.rows());
    const int n = ed.edge_state_dim / m;
    const Vector z = ed.z_projector * x0;
    const Matrix eye_n = Matrix::Identity(n, n);
    Vector z1 = kron(Matrix(tf.u1.transpose()), eye_n) * z;
    Vector z2 = kron(Matrix(tf.u2.transpose()), eye_n) * z;
    return {std::move(z1), std::move(z2)};
}

}  // namespace edge_consensus
