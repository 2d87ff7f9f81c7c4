#include "qbd/stability.hpp"

#include "qbd/driving.hpp"
#include "qbd/dynamics.hpp"
#include "qbd/error.hpp"

#include <string>

namespace qbd {

namespace {

void check_sizes(const State& psi, const Operator& A, const Operator& B, const char* where) {
    if (A.rows() != psi.size() || B.rows() != psi.size() || A.cols() != A.rows() || B.cols() != B.rows())
        fail(ErrorCode::DimensionMismatch, std::string(where) + ": size mismatch");
}

}  // namespace

double instability_general(const State& psi, const Operator& H, const Operator& dH) {
    check_sizes(psi, H, dH, "instability_general");
    const double dE2 = energy_variance(psi, H);
    if (std::sqrt(dE2) <= 1e-10) fail(ErrorCode::ZeroVariance, "instability_general: vanishing energy spread");
    const double var_dH = energy_variance(psi, dH);
    const double mean_H = expectation(psi, H);
    const double mean_dH = expectation(psi, dH);
    const double sym = expectation(psi, H * dH + dH * H) - 2.0 * mean_dH * mean_H;
    return -var_dH / (2.0 * dE2) + 0.375 * sym * sym / (dE2 * dE2);
}

double instability_cd(const State& psi, const Operator& H1, const Operator& dH) {
    check_sizes(psi, H1, dH, "instability_cd");
    const double mean_H1 = expectation(psi, H1);
    if (std::abs(mean_H1) >= 1e-10)
        fail(ErrorCode::PreconditionViolated, "instability_cd: <H1> must vanish on an eigenstate of H0");
    const State h1psi = H1 * psi;
    const double h1sq = h1psi.squaredNorm();
    if (h1sq <= 1e-12) fail(ErrorCode::PreconditionViolated, "instability_cd: <H1^2> vanishes");
    const double var_dH = energy_variance(psi, dH);
    // <H1 dH + dH H1> = 2 Re <H1 psi | dH psi>
    const double sym = 2.0 * h1psi.dot(dH * psi).real();
    return -var_dH / (2.0 * h1sq) + 0.375 * sym * sym / (h1sq * h1sq);
}

std::string_view to_string(Stability s) noexcept {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
    }
    return "unknown";
}

Stability classify(const std::vector<double>& values, double tol) {
    bool all_positive = !values.empty();
    for (double v : values) {
        if (v < -tol) return Stability::Unstable;
        if (v <= tol) all_positive = false;
    }
    return all_positive ? Stability::Stable : Stability::Marginal;
}

StabilityReport stability_report(const Protocol& protocol, const Perturbation& perturbation, const TimeGrid& grid,
                                 int branch) {
    if (branch < 0 || branch >= protocol.dim()) fail(ErrorCode::InvalidArgument, "stability_report: bad branch");
    const EigenPath path = track_eigenpath(protocol, grid);
    StabilityReport report;
    report.grid = grid;
    report.values.reserve(grid.points);
    for (std::size_t k = 0; k < grid.points; ++k) {
        const double t = grid.at(k);
        const State psi = path.systems[k].vector(branch);
        const Operator dH = perturbation.at(t);
        if (!is_hermitian(dH, 1e-12)) fail(ErrorCode::NonHermitian, "stability_report: perturbation not Hermitian");
        report.values.push_back(instability_cd(psi, counter_diabatic(protocol, t), dH));
    }
    report.classification = classify(report.values);
    return report;
}

}  // namespace qbd
