#pragma once

#include "qbd/spin1.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qbd {

inline constexpr const char* version_string = "0.1.0";

struct ExperimentConfig {
    int N = 3;
    double h0 = 1.0;
    double omega = 3.14159265358979323846 / 20.0;
    double delta_h = 0.5;
    double t_max = 40.0;
    double dt = 1e-3;
    spin1::PerturbationKind perturbation = spin1::PerturbationKind::None;
    std::string out_csv;
    std::string out_svg;
    std::uint64_t seed = 0;
    // Time profile of the perturbation amplitude; constant delta_h when empty.
    std::function<double(double)> delta_h_profile;

    // Throws Validation.
    void validate() const;
    double amplitude(double t) const { return delta_h_profile ? delta_h_profile(t) : delta_h; }
};

// Applies key=value pairs on top of cfg. Unknown keys and unparsable values throw Validation.
void apply_settings(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv);
// Reads a flat key=value file ('#' comments, blank lines ignored).
std::map<std::string, std::string> read_settings_file(const std::filesystem::path& path);
// Header echo: every field needed to rerun, values with 17 significant digits.
std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg);

struct RunRow {
    double t = 0.0;
    double fidelity = 0.0;
    double prob_s2_plus = 0.0;
    double prob_ideal = 0.0;
    double I_t = 0.0;

    bool operator==(const RunRow&) const = default;
};

struct RunOutput {
    std::map<std::string, std::string> metadata;
    std::vector<RunRow> rows;
};

// Propagates the S1(+1) eigenstate under H0 + H1 + dH and records, per grid point,
// fidelity against the closed-form adiabatic state, the S2(+1) probability,
// the same probability for ideal driving, and I(t) along the adiabatic state.
RunOutput run_experiment(const ExperimentConfig& cfg);

// One run per perturbation, in parallel; results in the order given.
std::vector<RunOutput> run_sweep(const ExperimentConfig& base, const std::vector<spin1::PerturbationKind>& kinds);

// Mean and minimum of the fidelity column.
struct FidelitySummary {
    double mean = 0.0;
    double min = 0.0;
};
FidelitySummary summarize_fidelity(const RunOutput& run);

}  // namespace qbd
