#include "qbd/qb.hpp"

#include "qbd/dynamics.hpp"
#include "qbd/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qbd {

namespace {

struct LeastSquares {
    Eigen::VectorXd x;
    Eigen::MatrixXd nullspace;  // columns
    Eigen::MatrixXd left_null;  // columns u with u^T A = 0
    double residual = 0.0;
};

// Minimal-norm least squares with singular values below cutoff * sigma_max treated as zero.
LeastSquares min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double cutoff = 1e-10) {
    LeastSquares out;
    const Eigen::Index rows = A.rows();
    const Eigen::Index cols = A.cols();
    if (cols == 0 || rows == 0) {
        out.x = Eigen::VectorXd::Zero(cols);
        out.nullspace = Eigen::MatrixXd::Identity(cols, cols);
        out.left_null = Eigen::MatrixXd::Identity(rows, rows);
        out.residual = b.norm();
        return out;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double threshold = s.size() > 0 ? cutoff * s[0] : 0.0;
    Eigen::Index rank = 0;
    while (rank < s.size() && s[rank] > threshold && s[rank] > 0.0) ++rank;

    const Eigen::MatrixXd& U = svd.matrixU();
    const Eigen::MatrixXd& V = svd.matrixV();
    out.x = Eigen::VectorXd::Zero(cols);
    for (Eigen::Index k = 0; k < rank; ++k) out.x += V.col(k) * (U.col(k).dot(b) / s[k]);
    out.nullspace = V.rightCols(cols - rank);
    out.left_null = U.rightCols(rows - rank);
    out.residual = (A * out.x - b).norm();
    return out;
}

Eigen::MatrixXd select(const Eigen::MatrixXd& M, const std::vector<int>& rows, const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = M(rows[i], cols[j]);
    return out;
}

Eigen::VectorXd select(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    Eigen::VectorXd out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
    return out;
}

Eigen::VectorXd scatter(const Eigen::VectorXd& v, const std::vector<int>& idx, Eigen::Index size) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(size);
    for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] = v[static_cast<Eigen::Index>(i)];
    return out;
}

// R with R * x = x x l, i.e. R(a,b) = sum_c f_abc l_c.
Eigen::MatrixXd right_cross_matrix(const StructureTensor& f, const Eigen::VectorXd& l) {
    const int M = f.size();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(M, M);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
            double acc = 0.0;
            for (int c = 0; c < M; ++c) acc += f(a, b, c) * l[c];
            R(a, b) = acc;
        }
    return R;
}

std::vector<int> complement_of(std::span<const int> constraints, int size) {
    std::vector<int> out;
    for (int a = 0; a < size; ++a)
        if (std::find(constraints.begin(), constraints.end(), a) == constraints.end()) out.push_back(a);
    return out;
}

void check_support(const Eigen::VectorXd& v, const std::vector<int>& forbidden, const char* what) {
    const double scale = std::max(1.0, v.norm());
    for (int a : forbidden)
        if (std::abs(v[a]) > 1e-12 * scale)
            fail(ErrorCode::InvalidArgument, std::string(what) + " has components off the constraint set");
}

}  // namespace

CommutationCheck commutation_condition(const Eigen::VectorXd& hC, const Eigen::VectorXd& l,
                                       const GeneratorBasis& basis) {
    const Eigen::VectorXd c = basis.structure().cross(hC, l);
    CommutationCheck out;
    out.residual = c.norm();
    out.commutes = out.residual < 1e-10 * hC.norm() * l.norm() || out.residual == 0.0;
    return out;
}

QBCompletion solve_completion(const Eigen::VectorXd& h0, const Eigen::VectorXd& dh0,
                              std::span<const int> constraint_indices, const GeneratorBasis& basis) {
    const int M = basis.size();
    if (h0.size() != M || dh0.size() != M) fail(ErrorCode::DimensionMismatch, "solve_completion: length mismatch");
    const double norm = h0.norm();
    if (norm < 1e-12) fail(ErrorCode::ZeroField, "solve_completion: |h0| vanishes");
    const std::vector<int> comp = complement_of(constraint_indices, M);
    check_support(h0, comp, "solve_completion: h0");
    check_support(dh0, comp, "solve_completion: dh0");

    // Left side: component of dh0 perpendicular to h0.
    const Eigen::VectorXd rhs = dh0 - (h0.dot(dh0) / (norm * norm)) * h0;
    // (x x h0) = R(h0) x restricted to complement columns.
    const Eigen::MatrixXd R = right_cross_matrix(basis.structure(), h0);
    std::vector<int> all(static_cast<std::size_t>(M));
    for (int a = 0; a < M; ++a) all[static_cast<std::size_t>(a)] = a;
    const Eigen::MatrixXd A = select(R, all, comp);

    const LeastSquares ls = min_norm_solve(A, rhs);
    QBCompletion out;
    out.particular = scatter(ls.x, comp, M);
    for (Eigen::Index k = 0; k < ls.nullspace.cols(); ++k) out.nullspace.push_back(scatter(ls.nullspace.col(k), comp, M));
    out.residual = ls.residual;
    out.status = ls.residual > 1e-8 * std::max(dh0.norm(), 1e-300) ? CompletionStatus::NoCompletion
                                                                     : CompletionStatus::Exact;
    return out;
}

Protocol attach_completion(const Protocol& protocol) {
    Protocol out = protocol;
    out.h1 = [p = protocol](double t) {
        const QBCompletion c =
            solve_completion(p.constraint_coeffs(t).vec, p.constraint_rate(t).vec, p.constraint_indices, *p.basis);
        if (c.status != CompletionStatus::Exact)
            fail(ErrorCode::NoSolution, "attach_completion: no completion at t=" + std::to_string(t));
        return CoeffVector(c.particular);
    };
    return out;
}

Eigen::Vector3d solve_h1_n2(const Eigen::Vector3d& h0, const Eigen::Vector3d& dh0) {
    const double n2 = h0.squaredNorm();
    if (std::sqrt(n2) < 1e-12) fail(ErrorCode::ZeroField, "solve_h1_n2: |h0| vanishes");
    return h0.cross(dh0) / n2;
}

Operator invariant_with_offset(const Eigen::VectorXd& l, const State& psi, const GeneratorBasis& basis) {
    const CoeffVector e = projector_coeffs(psi, basis);
    const double kappa = l.dot(e.vec) / std::sqrt(basis.dim() - 1.0);
    return to_matrix(CoeffVector(l, kappa), basis);
}

double initial_condition_residual(const Operator& F, const State& psi) {
    const Eigen::Index n = F.rows();
    const State u = psi / psi.norm();
    const Operator Q = Operator::Identity(n, n) - u * u.adjoint();
    return (Q * F * Q).norm();
}

namespace {

struct CompletionSolver {
    const Protocol& protocol;
    const TrajectoryOptions& options;
    std::vector<int> C;
    std::vector<int> P;
    int M;

    struct Result {
        Eigen::VectorXd h1;  // full length
        int nullspace_dim = 0;
        double offset_residual = 0.0;
    };

    Result solve(double t, const Eigen::VectorXd& l, bool check = true) const {
        const StructureTensor& f = protocol.basis->structure();
        const Eigen::VectorXd h0 = protocol.constraint_coeffs(t).vec;
        const Eigen::VectorXd dh0 = protocol.constraint_rate(t).vec;

        const Eigen::MatrixXd R = right_cross_matrix(f, l);  // x -> x x l
        const Eigen::MatrixXd L = f.left_cross_matrix(h0);   // v -> h0 x v
        Eigen::MatrixXd maskC = Eigen::MatrixXd::Zero(M, M);
        for (int a : C) maskC(a, a) = 1.0;

        // Primary: (h0 x l + x x l) vanishes off C.
        const Eigen::MatrixXd B = select(R, P, P);
        const Eigen::VectorXd g = select(Eigen::VectorXd(R * h0), P);  // h0 x l = R h0

        // Conditions the unknowns cannot touch must persist: differentiate them once,
        // with dl/dt = ((h0 + x) x l)|_C.
        const LeastSquares primary = min_norm_solve(B, -g);
        const Eigen::MatrixXd& Ul = primary.left_null;
        const Eigen::MatrixXd LmR = L * maskC * R;
        const Eigen::MatrixXd S2 = select(LmR, P, P);
        const Eigen::VectorXd base = select(Eigen::VectorXd(LmR * h0), P);
        const Eigen::VectorXd dterm = select(Eigen::VectorXd(R * dh0), P);

        Eigen::MatrixXd A(B.rows() + Ul.cols(), B.cols());
        Eigen::VectorXd b(B.rows() + Ul.cols());
        A << B, Ul.transpose() * S2;
        b << -g, -Ul.transpose() * (dterm + base);

        const LeastSquares ls = min_norm_solve(A, b);
        Eigen::VectorXd x = ls.x;
        if (options.free_function)
            for (Eigen::Index k = 0; k < ls.nullspace.cols(); ++k)
                x += options.free_function(t, static_cast<int>(k)) * ls.nullspace.col(k);

        Result r;
        r.h1 = scatter(x, P, M);
        r.nullspace_dim = static_cast<int>(ls.nullspace.cols());
        r.offset_residual = (B * x + g).norm();
        const double scale = std::max(1.0, h0.norm()) * std::max(1.0, l.norm());
        if (check && (r.offset_residual > options.solve_tol * scale || ls.residual > options.solve_tol * scale * (1.0 + dh0.norm())))
            fail(ErrorCode::NoSolution, "solve_trajectory: algebraic system inconsistent at t=" + std::to_string(t) +
                                            " (residual " + std::to_string(std::max(r.offset_residual, ls.residual)) +
                                            ")");
        return r;
    }

    Eigen::VectorXd rate(double t, const Eigen::VectorXd& l) const {
        // RK stages sit O(dt^2) off the constraint surface; consistency is checked on accepted states only.
        const Result r = solve(t, l, false);
        const Eigen::VectorXd h = protocol.constraint_coeffs(t).vec + r.h1;
        const Eigen::VectorXd full = protocol.basis->structure().cross(h, l);
        Eigen::VectorXd out = Eigen::VectorXd::Zero(M);
        for (int a : C) out[a] = full[a];
        return out;
    }
};

}  // namespace

QBTrajectory solve_trajectory(const Protocol& protocol, const Eigen::VectorXd& l0, const TimeGrid& grid,
                              const TrajectoryOptions& options) {
    const GeneratorBasis& basis = *protocol.basis;
    const int M = basis.size();
    if (l0.size() != M) fail(ErrorCode::DimensionMismatch, "solve_trajectory: l0 length mismatch");
    if (grid.points == 0) fail(ErrorCode::EmptyInput, "solve_trajectory: empty grid");
    const std::vector<int> P = protocol.complement_indices();
    check_support(l0, P, "solve_trajectory: l0");
    if (std::abs(l0.norm() - 1.0) > 1e-9) fail(ErrorCode::InvalidArgument, "solve_trajectory: l0 must be a unit vector");

    if (options.initial_state) {
        const double r = initial_condition_residual(invariant_with_offset(l0, *options.initial_state, basis),
                                                    *options.initial_state);
        if (r > options.initial_condition_tol)
            fail(ErrorCode::InitialConditionViolated,
                 "solve_trajectory: (1-P)F(1-P) residual " + std::to_string(r));
    }

    const CompletionSolver solver{protocol, options, protocol.constraint_indices, P, M};
    QBTrajectory traj;
    traj.grid = grid;

    Eigen::VectorXd l = l0;
    int max_null = 0;
    for (std::size_t k = 0; k < grid.points; ++k) {
        const double t = grid.at(k);
        const auto r = solver.solve(t, l);
        traj.l_path.push_back(l);
        traj.h1_path.push_back(r.h1);
        traj.nullspace_dim.push_back(r.nullspace_dim);
        traj.max_offset_residual = std::max(traj.max_offset_residual, r.offset_residual);
        max_null = std::max(max_null, r.nullspace_dim);
        if (k + 1 == grid.points) break;

        const double dt = grid.step;
        const Eigen::VectorXd k1 = solver.rate(t, l);
        const Eigen::VectorXd k2 = solver.rate(t + dt / 2, l + dt / 2 * k1);
        const Eigen::VectorXd k3 = solver.rate(t + dt / 2, l + dt / 2 * k2);
        const Eigen::VectorXd k4 = solver.rate(t + dt, l + dt * k3);
        l += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        l.normalize();
    }

    for (std::size_t k = 1; k + 1 < grid.points; ++k) {
        const Eigen::VectorXd fd = (traj.l_path[k + 1] - traj.l_path[k - 1]) / (2.0 * grid.step);
        const Eigen::VectorXd h = protocol.constraint_coeffs(grid.at(k)).vec + traj.h1_path[k];
        const Eigen::VectorXd full = basis.structure().cross(h, traj.l_path[k]);
        Eigen::VectorXd onC = Eigen::VectorXd::Zero(M);
        for (int a : protocol.constraint_indices) onC[a] = full[a];
        traj.max_rate_residual = std::max(traj.max_rate_residual, (fd - onC).norm());
    }

    traj.free_params.push_back("l(0): invariant direction on the constraint set; fixes integration constants");
    if (max_null > 0)
        traj.free_params.push_back("h1 nullspace: up to " + std::to_string(max_null) +
                                   " undetermined coefficient function(s), from TrajectoryOptions::free_function "
                                   "(default 0)");
    return traj;
}

double passage_time(const std::vector<State>& states, const HamiltonianFn& H, const TimeGrid& grid,
                    Velocity velocity) {
    if (states.size() != grid.points) fail(ErrorCode::DimensionMismatch, "passage_time: one state per grid point");
    if (states.size() < 2) fail(ErrorCode::EmptyInput, "passage_time: need at least two samples");
    std::vector<double> integrand(states.size());
    const std::size_t last = states.size() - 1;
    for (std::size_t k = 0; k < states.size(); ++k) {
        const State& psi = states[k];
        require_unit_norm(psi, "passage_time", 1e-8);
        const Operator Hk = H(grid.at(k));
        const double dE2 = energy_variance(psi, Hk);
        if (std::sqrt(dE2) < 1e-12)
            fail(ErrorCode::DegenerateSegment, "passage_time: vanishing energy spread at t=" + std::to_string(grid.at(k)));
        State dpsi;
        if (velocity == Velocity::Schrodinger) {
            dpsi = -I * (Hk * psi);
        } else {
            const std::size_t lo = k == 0 ? 0 : k - 1;
            const std::size_t hi = k == last ? last : k + 1;
            dpsi = (states[hi] - states[lo]) / (grid.at(hi) - grid.at(lo));
        }
        const double speed2 = dpsi.squaredNorm() - std::norm(psi.dot(dpsi));
        integrand[k] = std::sqrt(std::max(speed2, 0.0) / dE2);
    }
    double total = 0.0;
    for (std::size_t k = 1; k < states.size(); ++k) total += 0.5 * (integrand[k - 1] + integrand[k]) * grid.step;
    return total;
}

}  // namespace qbd
