#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edge_consensus/edge_dynamics.hpp"
#include "edge_consensus/errors.hpp"
#include "edge_consensus/numeric.hpp"
#include "support/test_support.hpp"

#include <cmath>
#include <random>

using namespace edge_consensus;

namespace {

const LtiModel kIntegrator = make_model(Matrix::Zero(1, 1), Matrix::Ones(1, 1));

Graph path_graph(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int k = 1; k < n; ++k) edges.emplace_back(k, k + 1);
    return build_graph(n, std::move(edges));
}

}  // namespace

TEST_CASE("integrator edge dynamics collapses to z' = w") {
    const GraphMatrices gm = compute_matrices(build_graph(3, {{1, 2}, {1, 3}, {2, 3}}));
    const EdgeDynamics ed = build_edge_dynamics(gm, kIntegrator);
    CHECK(ed.lbar_kron_a.norm() == doctest::Approx(0.0));
    CHECK((ed.input_map - Matrix::Identity(3, 3)).norm() < 1e-14);
    CHECK(ed.edge_state_dim == 3);

    // Consensus states have zero edge state.
    const Vector ones = Vector::Ones(3);
    CHECK((ed.z_projector * ones).norm() < 1e-14);
}

TEST_CASE("tree graphs have identity Lbar") {
    Matrix a(1, 1);
    a << 2.5;
    const GraphMatrices gm = compute_matrices(path_graph(3));
    const EdgeDynamics ed = build_edge_dynamics(gm, make_model(a, Matrix::Ones(1, 1)));
    CHECK((ed.lbar_kron_a - 2.5 * Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("build_edge_dynamics refuses disconnected graphs") {
    const GraphMatrices gm = compute_matrices(build_graph(4, {{1, 2}, {3, 4}}));
    CHECK_THROWS_AS(build_edge_dynamics(gm, kIntegrator), DisconnectedGraph);
}

TEST_CASE("transform on trees is square orthogonal with empty cycle part") {
    const GraphMatrices gm = compute_matrices(path_graph(4));
    const LaplacianSpectrum sp = spectrum(gm);
    const EdgeTransform tf = build_transform(gm, sp);
    CHECK(tf.is_tree);
    CHECK(tf.u1.cols() == 0);
    CHECK(tf.u2.rows() == 3);
    CHECK(tf.u2.cols() == 3);
    CHECK((tf.u2.transpose() * tf.u2 - Matrix::Identity(3, 3)).norm() < 1e-10);
}

TEST_CASE("triangle cycle space is the signed cycle vector") {
    const GraphMatrices gm = compute_matrices(build_graph(3, {{1, 2}, {1, 3}, {2, 3}}));
    const EdgeTransform tf = build_transform(gm, spectrum(gm));
    CHECK_FALSE(tf.is_tree);
    REQUIRE(tf.u1.cols() == 1);
    // Kernel of E for the oriented triangle is ±(1, -1, 1)/sqrt(3).
    Vector cycle(3);
    cycle << 1.0, -1.0, 1.0;
    cycle.normalize();
    CHECK(std::min((tf.u1.col(0) - cycle).norm(), (tf.u1.col(0) + cycle).norm()) < 1e-10);
    CHECK((gm.incidence * tf.u1).norm() < 1e-10);
}

TEST_CASE("single edge transform is the identity") {
    const GraphMatrices gm = compute_matrices(build_graph(2, {{1, 2}}));
    const EdgeTransform tf = build_transform(gm, spectrum(gm));
    CHECK(tf.u2.rows() == 1);
    CHECK(std::abs(std::abs(tf.u2(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("project_initial_state on two integrators") {
    const GraphMatrices gm = compute_matrices(build_graph(2, {{1, 2}}));
    const LaplacianSpectrum sp = spectrum(gm);
    const EdgeTransform tf = build_transform(gm, sp);
    const EdgeDynamics ed = build_edge_dynamics(gm, kIntegrator);

    Vector x0(2);
    x0 << 1.0, -1.0;
    const auto [z1, z2] = project_initial_state(tf, ed, x0);
    CHECK(z1.size() == 0);
    REQUIRE(z2.size() == 1);
    CHECK(std::abs(z2(0)) == doctest::Approx(2.0));

    // Oracle route: z2 = (Gamma^{1/2} V2^T ⊗ I) x0.
    const Vector z2_oracle =
        kron(Matrix(sp.gamma.cwiseSqrt().asDiagonal() * sp.v2.transpose()),
             Matrix::Identity(1, 1)) *
        x0;
    CHECK((z2 - z2_oracle).norm() < 1e-12);

    CHECK_THROWS_AS(project_initial_state(tf, ed, Vector::Zero(3)), InputError);
}

TEST_CASE("consensus initial conditions project to zero") {
    std::mt19937_64 gen(17);
    const Graph g = testing::random_connected_graph(gen, 3, 8);
    const GraphMatrices gm = compute_matrices(g);
    const LaplacianSpectrum sp = spectrum(gm);
    const EdgeTransform tf = build_transform(gm, sp);

    Matrix a = testing::random_matrix(gen, 2, 2);
    const LtiModel model = make_model(a, testing::random_matrix(gen, 2, 1));
    const EdgeDynamics ed = build_edge_dynamics(gm, model);

    Vector xi(2);
    xi << 0.7, -0.3;
    const Vector x0 = kron(Vector::Ones(g.node_count), xi);
    const auto [z1, z2] = project_initial_state(tf, ed, x0);
    CHECK(z1.norm() < 1e-12);
    CHECK(z2.norm() < 1e-12);
}

TEST_CASE("transform invariants on random graphs") {
    std::mt19937_64 gen(2024);
    const double mu = 1.7;
    for (int trial = 0; trial < 40; ++trial) {
        const Graph g = testing::random_connected_graph(gen, 2, 10, trial % 2 == 0);
        const GraphMatrices gm = compute_matrices(g);
        const LaplacianSpectrum sp = spectrum(gm);
        const EdgeTransform tf = build_transform(gm, sp);
        const int m = g.edge_count();
        const int n_nodes = g.node_count;

        const Matrix u = tf.u();
        CHECK((u.transpose() * u - Matrix::Identity(m, m)).norm() < 1e-10);
        CHECK((gm.incidence * tf.u1).norm() < 1e-9);
        CHECK((tf.u2.transpose() * gm.edge_laplacian * tf.u2 -
               Matrix(sp.gamma.asDiagonal()))
                  .norm() < 1e-9);

        // F (U^T E^T) = mu U^T E^T L with F = diag(0, mu Gamma).
        Matrix f = Matrix::Zero(m, m);
        f.bottomRightCorner(n_nodes - 1, n_nodes - 1) = mu * Matrix(sp.gamma.asDiagonal());
        const Matrix ut_et = u.transpose() * gm.incidence.transpose();
        CHECK((f * ut_et - mu * ut_et * gm.laplacian).norm() < 1e-9);

        // U diag(0, I) U^T recovers Lbar.
        Matrix gamma_bar = Matrix::Zero(m, m);
        gamma_bar.bottomRightCorner(n_nodes - 1, n_nodes - 1) =
            Matrix::Identity(n_nodes - 1, n_nodes - 1);
        CHECK((u * gamma_bar * u.transpose() - gm.lbar).norm() < 1e-8);

        // z2 projector identity (U2^T E^T = Gamma^{1/2} V2^T).
        const LtiModel model = make_model(testing::random_matrix(gen, 2, 2),
                                          testing::random_matrix(gen, 2, 1));
        const ReducedEdgeSystem rs = build_reduced_system(gm, sp, tf, model);
        const Matrix expected = kron(
            Matrix(sp.gamma.cwiseSqrt().asDiagonal() * sp.v2.transpose()),
            Matrix::Identity(2, 2));
        CHECK((rs.z2_projector - expected).norm() < 1e-9);
    }
}
