#include "qbd/dynamics.hpp"

#include "qbd/error.hpp"
#include "qbd/spectral.hpp"

#include <string>

namespace qbd {

void require_unit_norm(const State& psi, const char* where, double tol) {
    if (psi.size() == 0) fail(ErrorCode::EmptyInput, std::string(where) + ": empty state");
    if (std::abs(psi.norm() - 1.0) > tol) fail(ErrorCode::InvalidArgument, std::string(where) + ": state is not normalized");
}

Operator step_propagator(const Operator& H, double dt) {
    const EigenSystem sys = eigh(H);
    Eigen::VectorXcd phases(sys.dim());
    for (int n = 0; n < sys.dim(); ++n) phases[n] = std::exp(-I * dt * sys.values[n]);
    return sys.vectors * phases.asDiagonal() * sys.vectors.adjoint();
}

TrajectoryRecord propagate(const HamiltonianFn& H, const State& psi0, const TimeGrid& grid) {
    require_unit_norm(psi0, "propagate");
    if (grid.points == 0) fail(ErrorCode::EmptyInput, "propagate: empty grid");
    TrajectoryRecord rec;
    rec.grid = grid;
    rec.states.reserve(grid.points);
    rec.states.push_back(psi0);
    for (std::size_t k = 1; k < grid.points; ++k) {
        const double mid = grid.at(k - 1) + 0.5 * grid.step;
        const Operator Hm = H(mid);
        if (Hm.rows() != psi0.size()) fail(ErrorCode::DimensionMismatch, "propagate: Hamiltonian size mismatch");
        rec.states.push_back(step_propagator(Hm, grid.step) * rec.states.back());
    }
    return rec;
}

double fidelity(const State& a, const State& b) {
    if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "fidelity: size mismatch");
    return std::norm(a.dot(b));
}

double expectation(const State& psi, const Operator& A) { return psi.dot(A * psi).real(); }

double energy_variance(const State& psi, const Operator& H) {
    if (H.rows() != psi.size()) fail(ErrorCode::DimensionMismatch, "energy_variance: size mismatch");
    const State Hpsi = H * psi;
    const cplx mean = psi.dot(Hpsi);
    return (Hpsi - mean * psi).squaredNorm();
}

State eigenvector_for(const Operator& A, double eigenvalue, double tol) {
    const EigenSystem sys = eigh(A);
    int match = -1;
    for (int n = 0; n < sys.dim(); ++n)
        if (std::abs(sys.values[n] - eigenvalue) <= tol) {
            if (match >= 0)
                fail(ErrorCode::DegenerateEigenvalue, "eigenvalue " + std::to_string(eigenvalue) + " is degenerate");
            match = n;
        }
    if (match < 0) fail(ErrorCode::NoSuchEigenvalue, "no eigenvalue near " + std::to_string(eigenvalue));
    return sys.vector(match);
}

double eigen_probability(const State& psi, const Operator& A, double eigenvalue, double tol) {
    if (A.rows() != psi.size()) fail(ErrorCode::DimensionMismatch, "eigen_probability: size mismatch");
    return std::norm(eigenvector_for(A, eigenvalue, tol).dot(psi));
}

}  // namespace qbd
