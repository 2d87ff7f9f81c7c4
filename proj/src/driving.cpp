#include "qbd/driving.hpp"

#include "qbd/dynamics.hpp"
#include "qbd/error.hpp"

#include <cmath>
#include <string>

namespace qbd {

Operator counter_diabatic(const Operator& H0, const Operator& dH0, double gap_tol) {
    require_hermitian(H0, "counter_diabatic");
    require_hermitian(dH0, "counter_diabatic (rate)", 1e-10);
    if (dH0.rows() != H0.rows()) fail(ErrorCode::DimensionMismatch, "counter_diabatic: rate size mismatch");
    const EigenSystem sys = eigh(H0);
    const double gap = min_gap(sys.values);
    if (gap < gap_tol) fail(ErrorCode::NearDegeneracy, "counter_diabatic: spectral gap " + std::to_string(gap));

    const int n = sys.dim();
    const Eigen::MatrixXcd D = sys.vectors.adjoint() * dH0 * sys.vectors;
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(n, n);  // K(m,n) = <m|dn/dt>, m != n
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            if (m != k) K(m, k) = D(m, k) / (sys.values[k] - sys.values[m]);
    Operator H1 = I * sys.vectors * K * sys.vectors.adjoint();
    return (H1 + H1.adjoint()) / 2.0;
}

Operator counter_diabatic(const Protocol& protocol, double t, double gap_tol) {
    return counter_diabatic(protocol.constraint_hamiltonian(t), protocol.constraint_derivative(t), gap_tol);
}

HamiltonianFn transitionless_hamiltonian(const Protocol& protocol, double gap_tol) {
    return [protocol, gap_tol](double t) {
        return Operator(protocol.constraint_hamiltonian(t) + counter_diabatic(protocol, t, gap_tol));
    };
}

cplx offdiag_coupling(const Protocol& protocol, const EigenPath& path, int m, int n, std::size_t k,
                      CouplingMethod method) {
    if (k >= path.systems.size()) fail(ErrorCode::InvalidArgument, "offdiag_coupling: grid index out of range");
    const EigenSystem& sys = path.systems[k];
    if (m == n || m < 0 || n < 0 || m >= sys.dim() || n >= sys.dim())
        fail(ErrorCode::InvalidArgument, "offdiag_coupling: need distinct valid branches");
    if (method == CouplingMethod::Auto)
        method = protocol.has_analytic_rate() ? CouplingMethod::Analytic : CouplingMethod::FiniteDifference;

    if (method == CouplingMethod::Analytic) {
        const double gap = sys.values[n] - sys.values[m];
        if (std::abs(gap) < 1e-8) fail(ErrorCode::NearDegeneracy, "offdiag_coupling: vanishing gap");
        const Operator dH = protocol.constraint_derivative(path.grid.at(k));
        return sys.vector(m).dot(dH * sys.vector(n)) / gap;
    }

    const std::size_t last = path.systems.size() - 1;
    if (last == 0) fail(ErrorCode::InvalidArgument, "offdiag_coupling: finite differences need two samples");
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k == last ? last : k + 1;
    const double span = path.grid.at(hi) - path.grid.at(lo);
    const State dn = (path.systems[hi].vector(n) - path.systems[lo].vector(n)) / span;
    return sys.vector(m).dot(dn);
}

namespace {

// Phases for every branch of a path under H; empty H means <n|H|n> = E_n.
std::vector<std::vector<double>> path_phases(const EigenPath& path, const HamiltonianFn& H) {
    const std::size_t points = path.systems.size();
    const int dim = path.systems.front().dim();
    std::vector<std::vector<double>> alpha(static_cast<std::size_t>(dim), std::vector<double>(points, 0.0));

    auto energies = [&](std::size_t k) {
        Eigen::VectorXd e(dim);
        if (!H) return Eigen::VectorXd(path.systems[k].values);
        const Operator Hk = H(path.grid.at(k));
        for (int n = 0; n < dim; ++n) e[n] = expectation(path.systems[k].vector(n), Hk);
        return e;
    };

    Eigen::VectorXd e_prev = energies(0);
    for (std::size_t k = 1; k < points; ++k) {
        const Eigen::VectorXd e_next = energies(k);
        for (int n = 0; n < dim; ++n) {
            const cplx ov = path.systems[k - 1].vector(n).dot(path.systems[k].vector(n));
            const double connection = -std::arg(ov);
            const double energy = -0.5 * (e_prev[n] + e_next[n]) * path.grid.step;
            alpha[static_cast<std::size_t>(n)][k] = alpha[static_cast<std::size_t>(n)][k - 1] + connection + energy;
        }
        e_prev = e_next;
    }
    return alpha;
}

struct RefinedBranches {
    EigenPath path;  // on the finest grid
    std::vector<std::vector<double>> phases;
    std::size_t stride = 1;  // fine index = stride * coarse index
};

RefinedBranches refine_branches(const Protocol& protocol, const TimeGrid& grid, const HamiltonianFn& H,
                                double refine_tol) {
    constexpr int max_refinements = 8;
    RefinedBranches current;
    current.path = track_eigenpath(protocol, grid);
    current.phases = path_phases(current.path, H);
    if (grid.points < 2) return current;

    for (int level = 0; level < max_refinements; ++level) {
        RefinedBranches finer;
        finer.stride = current.stride * 2;
        const TimeGrid fine_grid = current.path.grid.refined();
        finer.path = track_eigenpath(protocol, fine_grid);
        finer.phases = path_phases(finer.path, H);

        // Compare the gauge-invariant products e^{i alpha} |n> on the input grid.
        double change = 0.0;
        for (std::size_t k = 0; k < grid.points; ++k) {
            const auto& a = current.path.systems[k * current.stride];
            const auto& b = finer.path.systems[k * finer.stride];
            for (int n = 0; n < a.dim(); ++n) {
                const auto un = static_cast<std::size_t>(n);
                const State sa = std::exp(I * current.phases[un][k * current.stride]) * a.vector(n);
                const State sb = std::exp(I * finer.phases[un][k * finer.stride]) * b.vector(n);
                change = std::max(change, (sa - sb).norm());
            }
        }
        current = std::move(finer);
        if (change < refine_tol) return current;
    }
    fail(ErrorCode::ConvergenceFailure, "lr_phase: grid refinement did not reach the requested tolerance");
}

}  // namespace

std::vector<double> lr_phase(const EigenPath& path, int branch, const HamiltonianFn& H) {
    if (path.systems.empty()) fail(ErrorCode::EmptyInput, "lr_phase: empty path");
    if (branch < 0 || branch >= path.systems.front().dim()) fail(ErrorCode::InvalidArgument, "lr_phase: bad branch");
    return path_phases(path, H)[static_cast<std::size_t>(branch)];
}

std::vector<double> lr_phase(const Protocol& protocol, int branch, const TimeGrid& grid, const HamiltonianFn& H,
                             double refine_tol) {
    if (branch < 0 || branch >= protocol.dim()) fail(ErrorCode::InvalidArgument, "lr_phase: bad branch");
    const RefinedBranches r = refine_branches(protocol, grid, H, refine_tol);
    std::vector<double> out(grid.points);
    for (std::size_t k = 0; k < grid.points; ++k) out[k] = r.phases[static_cast<std::size_t>(branch)][k * r.stride];
    return out;
}

AdiabaticSolution adiabatic_state(const Protocol& protocol, std::span<const double> weights, const TimeGrid& grid,
                                  const HamiltonianFn& H) {
    const int dim = protocol.dim();
    if (static_cast<int>(weights.size()) != dim)
        fail(ErrorCode::DimensionMismatch, "adiabatic_state: one weight per branch required");
    double total = 0.0;
    for (double c : weights) total += c * c;
    if (std::abs(total - 1.0) > 1e-10) fail(ErrorCode::InvalidArgument, "adiabatic_state: weights not normalized");

    const RefinedBranches r = refine_branches(protocol, grid, H, 1e-8);
    AdiabaticSolution sol;
    sol.grid = grid;
    sol.weights.assign(weights.begin(), weights.end());
    sol.phases.assign(static_cast<std::size_t>(dim), std::vector<double>(grid.points));
    sol.path.grid = grid;
    for (std::size_t k = 0; k < grid.points; ++k) {
        const EigenSystem& sys = r.path.systems[k * r.stride];
        State psi = State::Zero(dim);
        for (int n = 0; n < dim; ++n) {
            const auto un = static_cast<std::size_t>(n);
            const double a = r.phases[un][k * r.stride];
            sol.phases[un][k] = a;
            psi += weights[un] * std::exp(I * a) * sys.vector(n);
        }
        sol.states.push_back(std::move(psi));
        sol.path.systems.push_back(sys);
    }
    return sol;
}

InvariantReport invariant_drift(const Operator& F0, const HamiltonianFn& H, const TimeGrid& grid,
                                const std::optional<State>& psi0) {
    require_hermitian(F0, "invariant_drift");
    if (grid.points == 0) fail(ErrorCode::EmptyInput, "invariant_drift: empty grid");
    const Eigen::Index n = F0.rows();
    // The multiple of the identity is invariant exactly; only the traceless part is propagated.
    const cplx kappa = F0.trace() / static_cast<double>(n);
    const Operator T0 = F0 - kappa * Operator::Identity(n, n);
    const Eigen::VectorXd spectrum0 = eigh(T0).values;

    InvariantReport report;
    auto condition = [&](const Operator& F, const State& psi) {
        const Operator Q = Operator::Identity(n, n) - psi * psi.adjoint();
        return (Q * F * Q).norm();
    };
    if (psi0) {
        require_unit_norm(*psi0, "invariant_drift");
        report.initial_condition_residual = condition(F0, *psi0);
        report.max_condition_residual = *report.initial_condition_residual;
    }

    Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(n, n);
    for (std::size_t k = 1; k < grid.points; ++k) {
        U = step_propagator(H(grid.at(k - 1) + 0.5 * grid.step), grid.step) * U;
        Operator T = U * T0 * U.adjoint();
        T = (T + T.adjoint()) / 2.0;
        const Eigen::VectorXd spectrum = eigh(T).values;
        const Operator F = T + kappa * Operator::Identity(n, n);
        report.max_spectrum_drift =
            std::max(report.max_spectrum_drift, (spectrum - spectrum0).cwiseAbs().maxCoeff());
        if (psi0) {
            const double r = condition(F, U * *psi0);
            report.max_condition_residual = std::max(*report.max_condition_residual, r);
        }
    }
    return report;
}

Operator invariant_from_constraint(const Protocol& protocol, double t) {
    const CoeffVector h = protocol.constraint_coeffs(t);
    const double norm = h.norm();
    if (norm < 1e-12) fail(ErrorCode::ZeroField, "invariant_from_constraint: vanishing constraint field");
    return to_matrix(CoeffVector(h.vec / norm), *protocol.basis);
}

}  // namespace qbd
