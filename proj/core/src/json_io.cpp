#include "edge_consensus/json_io.hpp"

#include "edge_consensus/errors.hpp"

#include <cstdio>
#include <fstream>
#include <utility>
#include <vector>

namespace edge_consensus {

namespace {

Json complex_to_json(const Complex& c) { return Json::array({c.real(), c.imag()}); }

Complex complex_from_json(const Json& j) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2) {
        return Complex(j.at(0).get<double>(), j.at(1).get<double>());
    }
    throw InputError("expected a number or a [re, im] pair");
}

// Accepts a scalar (1x1), a flat array (column) or nested rows.
Matrix flexible_matrix(const Json& j) {
    if (j.is_number()) {
        return Matrix::Constant(1, 1, j.get<double>());
    }
    if (j.is_array() && !j.empty() && j.at(0).is_number()) {
        Matrix m(j.size(), 1);
        for (std::size_t i = 0; i < j.size(); ++i) m(i, 0) = j.at(i).get<double>();
        return m;
    }
    return matrix_from_json(j);
}

const Json& require(const Json& j, const char* key, const char* where) {
    if (!j.contains(key)) {
        throw InputError(std::string(where) + " is missing required key '" + key + "'");
    }
    return j.at(key);
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j.at(0).is_array()) {
        throw InputError("matrix must be a non-empty array of rows");
    }
    const std::size_t cols = j.at(0).size();
    Matrix m(j.size(), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j.at(i).size() != cols) {
            throw InputError("matrix rows have inconsistent lengths");
        }
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
    }
    return m;
}

Json complex_matrix_to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix complex_matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j.at(0).is_array()) {
        throw InputError("complex matrix must be a non-empty array of rows");
    }
    const std::size_t cols = j.at(0).size();
    ComplexMatrix m(j.size(), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = complex_from_json(j.at(i).at(k));
    }
    return m;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array()) {
        throw InputError("vector must be an array of numbers");
    }
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

Json spectrum_to_json(const Spectrum& s) {
    Json out = Json::array();
    for (const auto& c : s) out.push_back(complex_to_json(c));
    return out;
}

Spectrum spectrum_from_json(const Json& j) {
    Spectrum s;
    s.reserve(j.size());
    for (const auto& item : j) s.push_back(complex_from_json(item));
    return s;
}

Scenario scenario_from_json(const Json& j, const std::string& name) {
    Scenario sc;
    sc.name = name;

    {
        const Json& jg = require(j, "graph", "scenario");
        const int nodes = require(jg, "nodes", "graph").get<int>();
        std::vector<std::pair<int, int>> edges;
        std::vector<double> weights;
        bool any_weight = false;
        for (const auto& e : require(jg, "edges", "graph")) {
            if (!e.is_array() || e.size() < 2 || e.size() > 3) {
                throw InputError("each edge must be [i, j] or [i, j, weight]");
            }
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
            weights.push_back(e.size() == 3 ? (any_weight = true, e.at(2).get<double>()) : 1.0);
        }
        sc.graph = build_graph(nodes, std::move(edges), std::move(weights));
        (void)any_weight;
    }

    {
        const Json& jm = require(j, "model", "scenario");
        Matrix a = matrix_from_json(require(jm, "a", "model"));
        Matrix b = flexible_matrix(require(jm, "b", "model"));
        std::optional<RowVector> c;
        if (jm.contains("c")) {
            const Vector cv = vector_from_json(jm.at("c"));
            c = cv.transpose();
        }
        sc.model = make_model(std::move(a), std::move(b), std::move(c));
    }

    {
        const Json& jd = require(j, "design", "scenario");
        const int n = sc.model.state_dim();
        const int m = sc.model.input_dim();
        sc.design.mode = design_mode_from_string(require(jd, "mode", "design").get<std::string>());

        if (jd.contains("mu") == jd.contains("mu_values")) {
            throw InputError("design needs exactly one of 'mu' or 'mu_values'");
        }
        if (jd.contains("mu")) {
            sc.design.mu_values = {jd.at("mu").get<double>()};
        } else {
            for (const auto& v : jd.at("mu_values")) {
                sc.design.mu_values.push_back(v.get<double>());
            }
            if (sc.design.mu_values.empty()) {
                throw InputError("mu_values must not be empty");
            }
        }

        if (jd.contains("r1")) {
            const Json& jr = jd.at("r1");
            sc.design.r1 = jr.is_number()
                               ? Matrix(jr.get<double>() * Matrix::Identity(m, m))
                               : matrix_from_json(jr);
        } else {
            sc.design.r1 = Matrix::Identity(m, m);
        }

        switch (sc.design.mode) {
            case DesignMode::GlobalFullOrder:
            case DesignMode::LocalFullOrder: {
                if (jd.contains("q1")) {
                    const Json& jq = jd.at("q1");
                    sc.design.q1 = jq.is_number()
                                       ? Matrix(jq.get<double>() * Matrix::Identity(n, n))
                                       : matrix_from_json(jq);
                } else {
                    sc.design.q1 = Matrix::Identity(n, n);
                }
                break;
            }
            case DesignMode::ReducedOrder: {
                for (const auto& t : require(jd, "target_modes", "design")) {
                    sc.design.target_modes.push_back(complex_from_json(t));
                }
                const int q = static_cast<int>(sc.design.target_modes.size());
                if (q < 1 || q >= n) {
                    throw InputError("reduced design needs 1 <= q < n target modes");
                }
                if (jd.contains("q1_tilde")) {
                    const Json& jq = jd.at("q1_tilde");
                    sc.design.q1_tilde =
                        jq.is_number()
                            ? ComplexMatrix(jq.get<double>() * ComplexMatrix::Identity(q, q))
                            : complex_matrix_from_json(jq);
                } else {
                    sc.design.q1_tilde = ComplexMatrix::Identity(q, q);
                }
                break;
            }
            case DesignMode::FirstOrder: {
                sc.design.q1_scalar = jd.contains("q1") ? jd.at("q1").get<double>() : 1.0;
                break;
            }
        }
    }

    {
        const Json& js = require(j, "simulation", "scenario");
        if (js.contains("x0") == js.contains("seed")) {
            throw InputError("simulation needs exactly one of 'x0' or 'seed'");
        }
        if (js.contains("x0")) {
            sc.simulation.x0 = vector_from_json(js.at("x0"));
        } else {
            sc.simulation.seed = js.at("seed").get<std::uint64_t>();
        }
        if (js.contains("x0_scale")) {
            const Json& scale = js.at("x0_scale");
            sc.simulation.x0_scale =
                scale.is_number() ? Vector(Vector::Constant(1, scale.get<double>()))
                                  : vector_from_json(scale);
        }
        sc.simulation.horizon = require(js, "horizon", "simulation").get<double>();
        sc.simulation.step = require(js, "step", "simulation").get<double>();
        if (js.contains("record_every")) {
            sc.simulation.record_every = js.at("record_every").get<int>();
        }
        if (js.contains("threshold")) {
            sc.simulation.threshold = js.at("threshold").get<double>();
        }
        if (!(sc.simulation.horizon > 0.0) || !(sc.simulation.step > 0.0) ||
            sc.simulation.record_every < 1 || !(sc.simulation.threshold > 0.0)) {
            throw InputError("simulation horizon, step, record_every and threshold must be "
                             "positive");
        }
    }

    if (j.contains("outputs")) {
        const Json& jo = j.at("outputs");
        if (jo.contains("dir")) sc.outputs.directory = jo.at("dir").get<std::string>();
        if (jo.contains("format")) {
            const std::string fmt = jo.at("format").get<std::string>();
            if (fmt == "json") {
                sc.outputs.write_csv = false;
            } else if (fmt == "csv") {
                sc.outputs.write_json = false;
            } else if (fmt != "both") {
                throw InputError("outputs.format must be json, csv or both");
            }
        }
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open scenario file " + path.string());
    }
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("scenario file " + path.string() + " is not valid JSON: " + e.what());
    }
    return scenario_from_json(j, path.stem().string());
}

Json gain_to_json(const ControllerGain& gain) {
    Json j;
    j["mode"] = to_string(gain.mode);
    j["mu"] = gain.mu;
    j["k"] = matrix_to_json(gain.k);
    j["p1"] = matrix_to_json(gain.p1);
    j["order"] = gain.order;
    j["q1"] = matrix_to_json(gain.q1);
    j["r1"] = matrix_to_json(gain.r1);
    if (gain.basis) {
        Json jb;
        jb["lambda"] = spectrum_to_json(
            Spectrum(gain.basis->lambda.data(), gain.basis->lambda.data() + gain.basis->lambda.size()));
        jb["w"] = complex_matrix_to_json(gain.basis->w);
        jb["h"] = complex_matrix_to_json(gain.basis->h);
        jb["r_tilde"] = complex_matrix_to_json(gain.basis->r_tilde);
        if (gain.basis->nu.size() > 0) {
            jb["nu"] = vector_to_json(gain.basis->nu);
            jb["r1_scalar"] = gain.basis->r1_scalar;
        }
        j["basis"] = std::move(jb);
    }
    if (gain.p1_reduced) {
        j["p1_reduced"] = complex_matrix_to_json(*gain.p1_reduced);
    }
    return j;
}

ControllerGain gain_from_json(const Json& j) {
    ControllerGain gain;
    gain.mode = design_mode_from_string(require(j, "mode", "gain").get<std::string>());
    gain.mu = require(j, "mu", "gain").get<double>();
    gain.k = matrix_from_json(require(j, "k", "gain"));
    gain.p1 = matrix_from_json(require(j, "p1", "gain"));
    gain.order = require(j, "order", "gain").get<int>();
    gain.q1 = matrix_from_json(require(j, "q1", "gain"));
    gain.r1 = matrix_from_json(require(j, "r1", "gain"));
    if (j.contains("basis")) {
        const Json& jb = j.at("basis");
        ModeBasis basis;
        const Spectrum lambda = spectrum_from_json(jb.at("lambda"));
        basis.lambda = Eigen::Map<const ComplexVector>(lambda.data(), lambda.size());
        basis.w = complex_matrix_from_json(jb.at("w"));
        basis.h = complex_matrix_from_json(jb.at("h"));
        basis.r_tilde = complex_matrix_from_json(jb.at("r_tilde"));
        if (jb.contains("nu")) {
            basis.nu = vector_from_json(jb.at("nu"));
            basis.r1_scalar = jb.at("r1_scalar").get<double>();
        }
        gain.basis = std::move(basis);
    }
    if (j.contains("p1_reduced")) {
        gain.p1_reduced = complex_matrix_from_json(j.at("p1_reduced"));
    }
    return gain;
}

ControllerGain load_gain(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open gain file " + path.string());
    }
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("gain file " + path.string() + " is not valid JSON: " + e.what());
    }
    // A gain file produced by the synthesize command nests the gain object.
    if (j.contains("gain")) return gain_from_json(j.at("gain"));
    return gain_from_json(j);
}

Json synthesis_report(const SynthesisOutcome& outcome) {
    Json j;
    j["mu"] = outcome.mu;
    j["assumptions"] = {
        {"a1_holds", outcome.assumptions.a1_holds},
        {"a2_holds", outcome.assumptions.a2_holds},
        {"spectrum_of_a", spectrum_to_json(outcome.assumptions.spectrum_of_a)},
        {"imaginary_axis_eigs", spectrum_to_json(outcome.assumptions.imaginary_axis_eigs)},
    };
    j["gain"] = gain_to_json(outcome.gain);
    j["spectrum"] = {
        {"mas_predicted", spectrum_to_json(outcome.spectrum.mas_predicted)},
        {"edge_predicted", spectrum_to_json(outcome.spectrum.edge_predicted)},
        {"mas_computed", spectrum_to_json(outcome.spectrum.mas_computed)},
        {"edge_computed", spectrum_to_json(outcome.spectrum.edge_computed)},
        {"max_mismatch_mas", outcome.spectrum.max_mismatch_mas},
        {"max_mismatch_edge", outcome.spectrum.max_mismatch_edge},
        {"consensus_speed", outcome.spectrum.consensus_speed},
        {"closed_form", outcome.spectrum.closed_form},
    };
    j["mu_lower_bound_global"] = outcome.mu_lower_bound_global;
    j["mu_meets_global_bound"] = outcome.mu_meets_global_bound;
    return j;
}

Json simulation_report(const SimulationOutcome& outcome) {
    Json j;
    j["mu"] = outcome.synthesis.mu;
    j["threshold"] = outcome.threshold;
    if (outcome.time_to_consensus) {
        j["time_to_consensus"] = *outcome.time_to_consensus;
    } else {
        j["time_to_consensus"] = nullptr;
    }
    if (outcome.state_disagreement.fitted_rate) {
        j["fitted_rate"] = *outcome.state_disagreement.fitted_rate;
    } else {
        j["fitted_rate"] = nullptr;
    }
    const auto& mp = outcome.state_disagreement.max_pairwise;
    j["initial_state_disagreement"] = mp.size() > 0 ? mp(0) : 0.0;
    j["final_state_disagreement"] = mp.size() > 0 ? mp(mp.size() - 1) : 0.0;
    if (outcome.output_disagreement) {
        const auto& od = *outcome.output_disagreement;
        j["initial_output_disagreement"] = od.size() > 0 ? od(0) : 0.0;
        j["final_output_disagreement"] = od.size() > 0 ? od(od.size() - 1) : 0.0;
    }
    j["integrator"] = {
        {"step", outcome.trajectory.settings.step},
        {"horizon", outcome.trajectory.settings.horizon},
        {"record_every", outcome.trajectory.settings.record_every},
        {"samples", outcome.trajectory.samples()},
    };
    j["consensus_speed_predicted"] = outcome.synthesis.spectrum.consensus_speed;
    j["gain"] = gain_to_json(outcome.synthesis.gain);
    return j;
}

Json verification_report(const VerificationOutcome& outcome) {
    Json j;
    j["mu"] = outcome.mu;
    Json certs = Json::array();
    for (const auto& cert : outcome.certificates) {
        certs.push_back({
            {"name", cert.name},
            {"pass", cert.pass},
            {"value", cert.value},
            {"tolerance", cert.tolerance},
        });
    }
    j["certificates"] = std::move(certs);
    j["all_pass"] = outcome.all_pass;
    return j;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) {
        throw InputError("cannot open " + path.string() + " for writing");
    }
    const int dim = static_cast<int>(traj.states.rows());
    const int n_outputs = traj.outputs ? static_cast<int>(traj.outputs->rows()) : 0;
    int n = 0;  // per agent state dimension, when known
    if (traj.gain && traj.gain->k.cols() > 0 && dim % traj.gain->k.cols() == 0) {
        n = static_cast<int>(traj.gain->k.cols());
    } else if (n_outputs > 0 && dim % n_outputs == 0) {
        n = dim / n_outputs;
    }

    std::fprintf(f, "time");
    if (n > 0) {
        for (int agent = 0; agent < dim / n; ++agent) {
            for (int k = 0; k < n; ++k) std::fprintf(f, ",x_%d_%d", agent + 1, k + 1);
        }
    } else {
        for (int i = 0; i < dim; ++i) std::fprintf(f, ",x_%d", i + 1);
    }
    for (int agent = 0; agent < n_outputs; ++agent) std::fprintf(f, ",y_%d", agent + 1);
    std::fprintf(f, "\n");

    for (int s = 0; s < traj.samples(); ++s) {
        std::fprintf(f, "%.17g", traj.times(s));
        for (int i = 0; i < dim; ++i) std::fprintf(f, ",%.17g", traj.states(i, s));
        for (int agent = 0; agent < n_outputs; ++agent) {
            std::fprintf(f, ",%.17g", (*traj.outputs)(agent, s));
        }
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot open " + path.string() + " for writing");
    }
    out << j.dump(2) << "\n";
}

}  // namespace edge_consensus
