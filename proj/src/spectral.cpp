#include "qbd/spectral.hpp"

#include "qbd/error.hpp"
#include "qbd/protocol.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace qbd {

namespace {

double off_diagonal_norm(const Operator& A) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            if (i != j) s += std::norm(A(i, j));
    return std::sqrt(s);
}

// Zeroes A(p,q) with the unitary W = diag(1, e^{-i phi}) * [[c, s], [-s, c]]
// acting on columns/rows p and q. V accumulates the rotations.
void rotate(Operator& A, Eigen::MatrixXcd& V, Eigen::Index p, Eigen::Index q) {
    const cplx b = A(p, q);
    const double mag = std::abs(b);
    if (mag == 0.0) return;
    const cplx phase = b / mag;  // e^{i phi}
    const double a = A(p, p).real();
    const double d = A(q, q).real();
    const double tau = (d - a) / (2.0 * mag);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const cplx wqp = -s * std::conj(phase);  // W(q,p)
    const cplx wqq = c * std::conj(phase);   // W(q,q)

    const Eigen::Index n = A.rows();
    // A <- A W
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx akp = A(k, p);
        const cplx akq = A(k, q);
        A(k, p) = c * akp + wqp * akq;
        A(k, q) = s * akp + wqq * akq;
    }
    // A <- W^dagger A
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx apk = A(p, k);
        const cplx aqk = A(q, k);
        A(p, k) = c * apk + std::conj(wqp) * aqk;
        A(q, k) = s * apk + std::conj(wqq) * aqk;
    }
    A(p, q) = 0.0;
    A(q, p) = 0.0;
    A(p, p) = A(p, p).real();
    A(q, q) = A(q, q).real();
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx vkp = V(k, p);
        const cplx vkq = V(k, q);
        V(k, p) = c * vkp + wqp * vkq;
        V(k, q) = s * vkp + wqq * vkq;
    }
}

}  // namespace

void apply_phase_convention(Eigen::MatrixXcd& vectors) {
    for (Eigen::Index n = 0; n < vectors.cols(); ++n) {
        auto col = vectors.col(n);
        const double largest = col.cwiseAbs().maxCoeff();
        if (largest == 0.0) continue;
        Eigen::Index pick = 0;
        for (Eigen::Index i = 0; i < col.size(); ++i)
            if (std::abs(col[i]) >= largest * (1.0 - 1e-12)) {
                pick = i;
                break;
            }
        const cplx z = col[pick];
        col *= std::conj(z) / std::abs(z);
        col[pick] = std::abs(col[pick]);
    }
}

EigenSystem eigh(const Operator& H, const JacobiOptions& options) {
    require_hermitian(H, "eigh");
    const Eigen::Index n = H.rows();
    Operator A = (H + H.adjoint()) / 2.0;
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Identity(n, n);
    const double scale = A.norm();
    const double target = options.relative_tolerance * scale;

    int sweep = 0;
    while (off_diagonal_norm(A) > target) {
        if (sweep++ >= options.max_sweeps)
            fail(ErrorCode::ConvergenceFailure, "eigh: Jacobi iteration did not converge in " +
                                                    std::to_string(options.max_sweeps) + " sweeps");
        for (Eigen::Index p = 0; p < n - 1; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) rotate(A, V, p, q);
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return A(i, i).real() < A(j, j).real(); });
    EigenSystem sys;
    sys.values.resize(n);
    sys.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        sys.values[k] = A(order[k], order[k]).real();
        sys.vectors.col(k) = V.col(order[k]);
    }
    apply_phase_convention(sys.vectors);
    return sys;
}

double min_gap(const Eigen::VectorXd& values) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 1; k < values.size(); ++k) gap = std::min(gap, values[k] - values[k - 1]);
    return gap;
}

EigenPath track_eigenpath(const HamiltonianFn& H, const TimeGrid& grid, const TrackingOptions& options) {
    if (grid.points == 0) fail(ErrorCode::EmptyInput, "track_eigenpath: empty grid");
    EigenPath path;
    path.grid = grid;
    path.systems.reserve(grid.points);

    auto checked = [&](double t) {
        EigenSystem sys = eigh(H(t));
        const double gap = min_gap(sys.values);
        if (gap < options.gap_tol)
            fail(ErrorCode::NearDegeneracy, "track_eigenpath: spectral gap " + std::to_string(gap) +
                                                " at t=" + std::to_string(t));
        return sys;
    };

    path.systems.push_back(checked(grid.at(0)));
    for (std::size_t k = 1; k < grid.points; ++k) {
        const EigenSystem& prev = path.systems.back();
        EigenSystem next = checked(grid.at(k));
        const int n = prev.dim();
        const Eigen::MatrixXcd overlaps = prev.vectors.adjoint() * next.vectors;  // (branch, candidate)

        EigenSystem aligned;
        aligned.values.resize(n);
        aligned.vectors.resize(n, n);
        std::vector<bool> taken(static_cast<std::size_t>(n), false);
        for (int b = 0; b < n; ++b) {
            Eigen::Index best = 0;
            const double mag = overlaps.row(b).cwiseAbs().maxCoeff(&best);
            if (mag < options.min_overlap || taken[static_cast<std::size_t>(best)])
                fail(ErrorCode::AmbiguousTracking, "track_eigenpath: best overlap " + std::to_string(mag) +
                                                       " at t=" + std::to_string(grid.at(k)));
            taken[static_cast<std::size_t>(best)] = true;
            const cplx ov = overlaps(b, best);
            aligned.values[b] = next.values[best];
            aligned.vectors.col(b) = next.vectors.col(best) * (std::conj(ov) / std::abs(ov));
        }
        path.systems.push_back(std::move(aligned));
    }
    return path;
}

EigenPath track_eigenpath(const Protocol& protocol, const TimeGrid& grid, const TrackingOptions& options) {
    return track_eigenpath([&](double t) { return protocol.constraint_hamiltonian(t); }, grid, options);
}

}  // namespace qbd
