#include <benchmark/benchmark.h>

#include "edge_consensus/edge_dynamics.hpp"
#include "edge_consensus/graph_algebra.hpp"
#include "edge_consensus/linear_systems.hpp"
#include "edge_consensus/simulation.hpp"
#include "edge_consensus/synthesis.hpp"

#include <random>
#include <vector>

using namespace edge_consensus;

namespace {

LtiModel roll_model() {
    Matrix a(3, 3);
    a << 0.0, 1.0, 0.0, 0.0, -0.01, 0.2, 0.0, 0.0, -125.0;
    Matrix b(3, 1);
    b << 0.0, 0.0, 20.0;
    return make_model(a, b);
}

Graph path_graph(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int k = 1; k < n; ++k) edges.emplace_back(k, k + 1);
    return build_graph(n, std::move(edges));
}

Matrix random_spd(std::mt19937_64& gen, int n) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = dist(gen);
    }
    return m * m.transpose() + 0.1 * Matrix::Identity(n, n);
}

void BM_GraphSpectrum(benchmark::State& state) {
    const Graph g = path_graph(static_cast<int>(state.range(0)));
    const GraphMatrices gm = compute_matrices(g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectrum(gm));
    }
}
BENCHMARK(BM_GraphSpectrum)->Arg(9)->Arg(50);

void BM_SolveCare(benchmark::State& state) {
    std::mt19937_64 gen(1);
    const int n = static_cast<int>(state.range(0));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = dist(gen);
    }
    Matrix b(n, 2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 2; ++j) b(i, j) = dist(gen);
    }
    const Matrix q = random_spd(gen, n);
    const Matrix r1 = random_spd(gen, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_care(a, b, q, r1));
    }
}
BENCHMARK(BM_SolveCare)->Arg(4)->Arg(8);

void BM_FirstOrderDesign(benchmark::State& state) {
    const LtiModel model = roll_model();
    Matrix r1(1, 1);
    r1 << 100.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(design_first_order(model, 1.0, r1, 0.01));
    }
}
BENCHMARK(BM_FirstOrderDesign);

void BM_PredictedSpectrum(benchmark::State& state) {
    const LtiModel model = roll_model();
    Matrix r1(1, 1);
    r1 << 100.0;
    const LaplacianSpectrum sp = spectrum(compute_matrices(path_graph(9)));
    const ControllerGain gain = design_first_order(model, 1.0, r1, 0.01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(predicted_spectrum(gain, sp, model));
    }
}
BENCHMARK(BM_PredictedSpectrum);

void BM_SimulateRolls(benchmark::State& state) {
    const LtiModel model = roll_model();
    Matrix r1(1, 1);
    r1 << 100.0;
    const GraphMatrices gm = compute_matrices(path_graph(9));
    const ControllerGain gain = design_first_order(model, 1.0, r1, 0.01);
    Vector x0 = Vector::Zero(27);
    for (int agent = 0; agent < 9; ++agent) x0(agent * 3) = 0.01 * (agent % 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            simulate_closed_loop(gm, model, gain, x0, 10.0, 1e-3, 100));
    }
}
BENCHMARK(BM_SimulateRolls);

}  // namespace

BENCHMARK_MAIN();
