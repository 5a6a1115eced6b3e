#pragma once

#include "edge_consensus/scenario.hpp"
#include "edge_consensus/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace edge_consensus {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json complex_matrix_to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);
Json spectrum_to_json(const Spectrum& s);
Spectrum spectrum_from_json(const Json& j);

Scenario scenario_from_json(const Json& j, const std::string& name);
Scenario load_scenario(const std::filesystem::path& path);

Json gain_to_json(const ControllerGain& gain);
ControllerGain gain_from_json(const Json& j);
ControllerGain load_gain(const std::filesystem::path& path);

Json synthesis_report(const SynthesisOutcome& outcome);
Json simulation_report(const SimulationOutcome& outcome);
Json verification_report(const VerificationOutcome& outcome);

/// Header style: time,x_1_1,...,x_N_n plus y_1..y_N when outputs exist. The
/// per-agent state dimension is taken from the attached gain when present.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace edge_consensus
