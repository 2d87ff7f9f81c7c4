// qbdrive: spin-1 counter-diabatic driving experiments from the command line.

#include "qbd/csv.hpp"
#include "qbd/error.hpp"
#include "qbd/experiment.hpp"
#include "qbd/svg.hpp"
#include "qbd/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

enum Exit { Ok = 0, ValidationError = 1, NumericalFailure = 2, VerificationFailure = 3 };

struct Overrides {
    std::string config;
    std::optional<double> h0, omega, delta_h, t_max, dt;
    std::optional<int> N;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> perturbation;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "key=value config file");
        cmd->add_option("--N", N, "Hilbert space dimension (3)");
        cmd->add_option("--h0", h0, "field magnitude");
        cmd->add_option("--omega", omega, "angular frequency");
        cmd->add_option("--delta-h", delta_h, "perturbation amplitude");
        cmd->add_option("--t-max", t_max, "end time");
        cmd->add_option("--dt", dt, "time step");
        cmd->add_option("--seed", seed, "seed for randomized suites");
    }

    qbd::ExperimentConfig resolve() const {
        qbd::ExperimentConfig cfg;
        if (!config.empty()) qbd::apply_settings(cfg, qbd::read_settings_file(config));
        std::map<std::string, std::string> kv;
        auto put = [&](const char* key, const auto& opt) {
            if (opt) {
                if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, double>) kv[key] = qbd::format_double(*opt);
                else if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, std::string>) kv[key] = *opt;
                else kv[key] = std::to_string(*opt);
            }
        };
        put("N", N);
        put("h0", h0);
        put("omega", omega);
        put("delta_h", delta_h);
        put("t_max", t_max);
        put("dt", dt);
        put("seed", seed);
        put("perturbation", perturbation);
        qbd::apply_settings(cfg, kv);
        cfg.validate();
        return cfg;
    }
};

void emit(const qbd::RunOutput& run, const std::string& csv, const std::string& svg, const std::string& title) {
    if (!csv.empty()) qbd::write_file_atomic(csv, qbd::to_csv(run));
    if (!svg.empty()) {
        qbd::PlotStyle style;
        style.title = title;
        qbd::write_file_atomic(svg, qbd::render_plot(run, style));
    }
}

void summary(const std::string& label, const qbd::RunOutput& run) {
    const auto s = qbd::summarize_fidelity(run);
    std::printf("%-5s mean fidelity %.6f  min fidelity %.6f  rows %zu\n", label.c_str(), s.mean, s.min,
                run.rows.size());
}

std::string title_for(qbd::spin1::PerturbationKind kind) {
    using K = qbd::spin1::PerturbationKind;
    switch (kind) {
        case K::None: return "ideal driving";
        case K::S3: return "S3 perturbation";
        case K::L4: return "lambda_4 perturbation";
        case K::L5: return "lambda_5 perturbation";
        case K::L8: return "lambda_8 perturbation";
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counter-diabatic driving from the quantum brachistochrone"};
    app.require_subcommand(1);

    Overrides run_opts;
    std::string out_csv, out_svg;
    auto* run = app.add_subcommand("run", "run one spin-1 experiment");
    run_opts.attach(run);
    run->add_option("--perturbation", run_opts.perturbation, "none|s3|l4|l5|l8");
    run->add_option("--out-csv", out_csv, "CSV output path");
    run->add_option("--out-svg", out_svg, "SVG output path");

    std::string suite = "all";
    auto* verify = app.add_subcommand("verify", "run the invariant and closed-form suites");
    verify->add_option("suite", suite, "algebra|qb|driving|stability|all");

    Overrides sweep_opts;
    std::string perturbations = "all";
    std::string out_dir = ".";
    auto* sweep = app.add_subcommand("sweep", "run the four perturbed experiments in parallel");
    sweep_opts.attach(sweep);
    sweep->add_option("--perturbations", perturbations, "all or comma list of s3,l4,l5,l8");
    sweep->add_option("--out-dir", out_dir, "directory for CSV and SVG files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : ValidationError;
    }

    try {
        if (*run) {
            auto cfg = run_opts.resolve();
            if (!out_csv.empty()) cfg.out_csv = out_csv;
            if (!out_svg.empty()) cfg.out_svg = out_svg;
            const auto result = qbd::run_experiment(cfg);
            emit(result, cfg.out_csv, cfg.out_svg, title_for(cfg.perturbation));
            summary(std::string(qbd::spin1::to_string(cfg.perturbation)), result);
            return Ok;
        }
        if (*verify) {
            const bool ok = qbd::print_report(qbd::run_verification(suite), std::cout);
            return ok ? Ok : VerificationFailure;
        }
        if (*sweep) {
            const auto base = sweep_opts.resolve();
            std::vector<qbd::spin1::PerturbationKind> kinds;
            if (perturbations == "all") {
                kinds.assign(std::begin(qbd::spin1::all_perturbations), std::end(qbd::spin1::all_perturbations));
            } else {
                std::size_t pos = 0;
                while (pos <= perturbations.size()) {
                    const auto comma = perturbations.find(',', pos);
                    const auto word = perturbations.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
                    auto kind = qbd::spin1::parse_perturbation(word);
                    if (!kind) throw qbd::Error(qbd::ErrorCode::Validation, "unknown perturbation '" + word + "'");
                    kinds.push_back(*kind);
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
            }
            std::filesystem::create_directories(out_dir);
            const auto results = qbd::run_sweep(base, kinds);
            for (std::size_t i = 0; i < kinds.size(); ++i) {
                const std::string stem = std::string("run_") + std::string(qbd::spin1::to_string(kinds[i]));
                const auto dir = std::filesystem::path(out_dir);
                emit(results[i], (dir / (stem + ".csv")).string(), (dir / (stem + ".svg")).string(), title_for(kinds[i]));
                summary(std::string(qbd::spin1::to_string(kinds[i])), results[i]);
            }
            return Ok;
        }
    } catch (const qbd::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.code()) {
            case qbd::ErrorCode::Validation:
            case qbd::ErrorCode::InvalidArgument:
            case qbd::ErrorCode::Io:
            case qbd::ErrorCode::EmptyInput: return ValidationError;
            default: return NumericalFailure;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return NumericalFailure;
    }
    return Ok;
}
