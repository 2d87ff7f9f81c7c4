#include "qbd/experiment.hpp"

#include "qbd/csv.hpp"
#include "qbd/driving.hpp"
#include "qbd/dynamics.hpp"
#include "qbd/error.hpp"
#include "qbd/stability.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>

namespace qbd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    double x = 0.0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x))
        fail(ErrorCode::Validation, key + ": not a finite number: '" + value + "'");
    return x;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& value) {
    Int x{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, x);
    if (ec != std::errc() || ptr != end) fail(ErrorCode::Validation, key + ": not an integer: '" + value + "'");
    return x;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (N != 3) fail(ErrorCode::Validation, "N must be 3 for the spin-1 experiment");
    if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::Validation, "dt must be positive");
    if (!(t_max >= dt) || !std::isfinite(t_max)) fail(ErrorCode::Validation, "t_max must be at least dt");
    if (!(h0 > 0.0) || !std::isfinite(h0)) fail(ErrorCode::Validation, "h0 must be positive");
    if (!std::isfinite(omega) || omega == 0.0) fail(ErrorCode::Validation, "omega must be finite and nonzero");
    if (!std::isfinite(delta_h)) fail(ErrorCode::Validation, "delta_h must be finite");
}

void apply_settings(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "N") cfg.N = parse_int<int>(key, value);
        else if (key == "h0") cfg.h0 = parse_real(key, value);
        else if (key == "omega") cfg.omega = parse_real(key, value);
        else if (key == "delta_h") cfg.delta_h = parse_real(key, value);
        else if (key == "t_max") cfg.t_max = parse_real(key, value);
        else if (key == "dt") cfg.dt = parse_real(key, value);
        else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(key, value);
        else if (key == "out_csv") cfg.out_csv = value;
        else if (key == "out_svg") cfg.out_svg = value;
        else if (key == "perturbation") {
            auto kind = spin1::parse_perturbation(value);
            if (!kind) fail(ErrorCode::Validation, "unknown perturbation '" + value + "'");
            cfg.perturbation = *kind;
        } else if (key == "version") {
            // echoed by the CSV header, ignored on input
        } else {
            fail(ErrorCode::Validation, "unknown config key '" + key + "'");
        }
    }
}

std::map<std::string, std::string> read_settings_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open config file " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::Validation, path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg) {
    return {
        {"N", std::to_string(cfg.N)},
        {"h0", format_double(cfg.h0)},
        {"omega", format_double(cfg.omega)},
        {"delta_h", format_double(cfg.delta_h)},
        {"t_max", format_double(cfg.t_max)},
        {"dt", format_double(cfg.dt)},
        {"perturbation", std::string(spin1::to_string(cfg.perturbation))},
        {"seed", std::to_string(cfg.seed)},
        {"version", version_string},
    };
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const Protocol protocol = spin1::rotating_field(cfg.h0, cfg.omega);
    const Operator dH_op = spin1::perturbation_operator(cfg.perturbation);
    const bool perturbed = cfg.perturbation != spin1::PerturbationKind::None;

    HamiltonianFn H = [&](double t) -> Operator {
        Operator h = protocol.constraint_hamiltonian(t) + counter_diabatic(protocol, t);
        if (perturbed) h += cfg.amplitude(t) * dH_op;
        return h;
    };

    const TimeGrid grid = TimeGrid::span(0.0, cfg.t_max, cfg.dt);
    const State psi0 = eigenvector_for(spin1::S1(), 1.0);
    const TrajectoryRecord record = propagate(H, psi0, grid);
    const State s2_plus = eigenvector_for(spin1::S2(), 1.0);

    RunOutput out;
    out.metadata = config_echo(cfg);
    out.rows.reserve(grid.points);
    for (std::size_t k = 0; k < grid.points; ++k) {
        const double t = grid.at(k);
        const State& psi = record.states[k];
        const State ad = spin1::adiabatic_state(cfg.omega, t);
        RunRow row;
        row.t = t;
        row.fidelity = fidelity(ad, psi);
        row.prob_s2_plus = std::norm(s2_plus.dot(psi));
        row.prob_ideal = std::norm(s2_plus.dot(ad));
        if (perturbed) row.I_t = instability_cd(ad, counter_diabatic(protocol, t), cfg.amplitude(t) * dH_op);
        out.rows.push_back(row);
    }
    return out;
}

std::vector<RunOutput> run_sweep(const ExperimentConfig& base, const std::vector<spin1::PerturbationKind>& kinds) {
    std::vector<std::future<RunOutput>> jobs;
    for (auto kind : kinds) {
        ExperimentConfig cfg = base;
        cfg.perturbation = kind;
        jobs.push_back(std::async(std::launch::async, [cfg] { return run_experiment(cfg); }));
    }
    std::vector<RunOutput> out;
    for (auto& job : jobs) out.push_back(job.get());
    return out;
}

FidelitySummary summarize_fidelity(const RunOutput& run) {
    if (run.rows.empty()) fail(ErrorCode::EmptyInput, "summarize_fidelity: empty run");
    FidelitySummary s{0.0, 1.0};
    for (const auto& r : run.rows) {
        s.mean += r.fidelity;
        s.min = std::min(s.min, r.fidelity);
    }
    s.mean /= static_cast<double>(run.rows.size());
    return s;
}

}  // namespace qbd
