#pragma once

#include "qbd/types.hpp"

#include <vector>

namespace qbd {

struct Protocol;

struct EigenSystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // orthonormal columns

    int dim() const { return static_cast<int>(values.size()); }
    State vector(int n) const { return vectors.col(n); }
    Operator reconstruct() const { return vectors * values.asDiagonal() * vectors.adjoint(); }
};

struct JacobiOptions {
    double relative_tolerance = 1e-14;  // off-diagonal Frobenius norm relative to ||H||_F
    int max_sweeps = 100;
};

// Cyclic complex Jacobi eigensolver for Hermitian matrices. Eigenvalues ascend,
// and each eigenvector has its largest-magnitude component real and positive.
EigenSystem eigh(const Operator& H, const JacobiOptions& options = {});

// Rotates each column so its largest-magnitude entry (first one, within 1e-12
// relative) is real positive.
void apply_phase_convention(Eigen::MatrixXcd& vectors);

double min_gap(const Eigen::VectorXd& ascending_values);

struct TrackingOptions {
    double gap_tol = 1e-8;
    double min_overlap = 0.9;
};

// Eigensystems along a grid with continuous branch labels. Column n of every
// system is the same branch; consecutive vectors of a branch have real
// positive overlap (parallel-transport gauge).
struct EigenPath {
    TimeGrid grid;
    std::vector<EigenSystem> systems;
};

EigenPath track_eigenpath(const HamiltonianFn& H, const TimeGrid& grid, const TrackingOptions& options = {});
// Tracks the constraint Hamiltonian H_C(t) of the protocol.
EigenPath track_eigenpath(const Protocol& protocol, const TimeGrid& grid, const TrackingOptions& options = {});

}  // namespace qbd
