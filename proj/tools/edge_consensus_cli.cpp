#include "edge_consensus/errors.hpp"
#include "edge_consensus/json_io.hpp"
#include "edge_consensus/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace edge_consensus;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitSynthesis = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitVerification = 4;

int log_level() {
    const char* env = std::getenv("EDGE_CONSENSUS_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v == "debug" || v == "2") return 2;
    if (v == "info" || v == "1") return 1;
    return 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[edge-consensus] " << msg << "\n";
}

std::string mu_tag(double mu) {
    std::ostringstream os;
    os << "mu" << mu;
    return os.str();
}

struct CommonOptions {
    std::string out_dir = ".";
    std::string format;
    std::optional<double> threshold;
    std::optional<std::uint64_t> seed;
};

void apply_overrides(Scenario& scenario, const CommonOptions& opts) {
    if (!opts.out_dir.empty()) scenario.outputs.directory = opts.out_dir;
    if (!opts.format.empty()) {
        scenario.outputs.write_json = opts.format != "csv";
        scenario.outputs.write_csv = opts.format != "json";
    }
    if (opts.threshold) scenario.simulation.threshold = *opts.threshold;
    if (opts.seed) {
        scenario.simulation.seed = *opts.seed;
        scenario.simulation.x0.reset();
    }
}

Scenario load_or_exit(const std::string& path, const CommonOptions& opts) {
    try {
        Scenario scenario = load_scenario(path);
        apply_overrides(scenario, opts);
        fs::create_directories(scenario.outputs.directory);
        return scenario;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitParse);
    }
}

int cmd_synthesize(const std::string& path, const CommonOptions& opts) {
    const Scenario scenario = load_or_exit(path, opts);
    for (const double mu : scenario.design.mu_values) {
        try {
            log_info("synthesize " + scenario.name + " " + mu_tag(mu));
            const SynthesisOutcome outcome = run_synthesize(scenario, mu);
            const fs::path out = fs::path(scenario.outputs.directory) /
                                 (scenario.name + "_" + mu_tag(mu) + "_gain.json");
            write_json_file(out, synthesis_report(outcome));
            std::cout << out.string() << "\n";
        } catch (const SynthesisError& e) {
            std::cerr << "synthesis error: " << e.what() << "\n";
            return kExitSynthesis;
        } catch (const Error& e) {
            std::cerr << "synthesis error: " << e.what() << "\n";
            return kExitSynthesis;
        }
    }
    return kExitOk;
}

int cmd_simulate(const std::string& path, const CommonOptions& opts) {
    const Scenario scenario = load_or_exit(path, opts);
    Json summary;
    summary["scenario"] = scenario.name;
    Json runs = Json::array();
    for (const double mu : scenario.design.mu_values) {
        SimulationOutcome outcome;
        try {
            log_info("simulate " + scenario.name + " " + mu_tag(mu));
            outcome = run_simulate(scenario, mu);
        } catch (const SimulationError& e) {
            std::cerr << "simulation error: " << e.what() << "\n";
            return kExitSimulation;
        } catch (const Error& e) {
            std::cerr << "synthesis error: " << e.what() << "\n";
            return kExitSynthesis;
        }
        const fs::path base = fs::path(scenario.outputs.directory) /
                              (scenario.name + "_" + mu_tag(mu));
        if (scenario.outputs.write_csv) {
            write_trajectory_csv(fs::path(base.string() + "_trajectory.csv"),
                                 outcome.trajectory);
        }
        const Json report = simulation_report(outcome);
        if (scenario.outputs.write_json) {
            write_json_file(fs::path(base.string() + "_report.json"), report);
        }
        Json entry;
        entry["mu"] = mu;
        entry["time_to_consensus"] = report.at("time_to_consensus");
        entry["fitted_rate"] = report.at("fitted_rate");
        runs.push_back(std::move(entry));
        std::cout << base.string() << "_report.json\n";
    }
    summary["runs"] = std::move(runs);
    if (scenario.outputs.write_json && scenario.design.mu_values.size() > 1) {
        write_json_file(fs::path(scenario.outputs.directory) /
                            (scenario.name + "_summary.json"),
                        summary);
    }
    return kExitOk;
}

int cmd_verify(const std::string& path, const CommonOptions& opts,
               const std::string& gain_path) {
    const Scenario scenario = load_or_exit(path, opts);
    std::optional<ControllerGain> gain_override;
    if (!gain_path.empty()) {
        try {
            gain_override = load_gain(gain_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitParse;
        }
    }
    bool all_pass = true;
    for (const double mu : scenario.design.mu_values) {
        VerificationOutcome outcome;
        try {
            log_info("verify " + scenario.name + " " + mu_tag(mu));
            std::optional<ControllerGain> gain = gain_override;
            if (gain) gain->mu = mu;
            outcome = run_verify(scenario, mu, gain);
        } catch (const SimulationError& e) {
            std::cerr << "simulation error: " << e.what() << "\n";
            return kExitSimulation;
        } catch (const Error& e) {
            std::cerr << "synthesis error: " << e.what() << "\n";
            return kExitSynthesis;
        }
        const fs::path out = fs::path(scenario.outputs.directory) /
                             (scenario.name + "_" + mu_tag(mu) + "_verify.json");
        write_json_file(out, verification_report(outcome));
        for (const auto& cert : outcome.certificates) {
            std::cout << (cert.pass ? "PASS " : "FAIL ") << cert.name << " value=" << cert.value
                      << " tol=" << cert.tolerance << " " << mu_tag(mu) << "\n";
        }
        all_pass = all_pass && outcome.all_pass;
    }
    return all_pass ? kExitOk : kExitVerification;
}

int cmd_sweep(const std::vector<std::string>& paths, const CommonOptions& opts) {
    std::vector<std::future<int>> jobs;
    jobs.reserve(paths.size());
    for (const std::string& path : paths) {
        jobs.push_back(std::async(std::launch::async, [path, opts]() {
            CommonOptions sub = opts;
            const fs::path stem = fs::path(path).stem();
            sub.out_dir = (fs::path(opts.out_dir) / stem).string();
            return cmd_simulate(path, sub);
        }));
    }
    int worst = kExitOk;
    for (auto& job : jobs) {
        worst = std::max(worst, job.get());
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed consensus controller synthesis and simulation"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string scenario_path;
    std::string gain_path;
    std::vector<std::string> sweep_paths;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", opts.out_dir, "Output directory");
        cmd->add_option("--format", opts.format, "Report format")
            ->check(CLI::IsMember({"json", "csv", "both"}));
        cmd->add_option("--threshold", opts.threshold,
                        "Consensus threshold on the output disagreement");
        cmd->add_option("--seed", opts.seed, "Override the scenario seed");
    };

    CLI::App* synth = app.add_subcommand("synthesize", "Design a gain and report its spectrum");
    synth->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    add_common(synth);

    CLI::App* sim = app.add_subcommand("simulate", "Synthesize, simulate and report");
    sim->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    add_common(sim);

    CLI::App* verify = app.add_subcommand("verify", "Run the certificate suite");
    verify->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    verify->add_option("--gain", gain_path, "Verify this gain file instead of redesigning");
    add_common(verify);

    CLI::App* sweep = app.add_subcommand("sweep", "Simulate several scenarios concurrently");
    sweep->add_option("scenarios", sweep_paths, "Scenario JSON files")->required();
    add_common(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitParse;
    }

    if (synth->parsed()) return cmd_synthesize(scenario_path, opts);
    if (sim->parsed()) return cmd_simulate(scenario_path, opts);
    if (verify->parsed()) return cmd_verify(scenario_path, opts, gain_path);
    if (sweep->parsed()) return cmd_sweep(sweep_paths, opts);
    return kExitParse;
}
