#pragma once

#include "qbd/protocol.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qbd {

struct CommutationCheck {
    bool commutes = false;
    double residual = 0.0;  // ||h0 x l||
};

// [H_C, F] = 0 expressed as h0 x l = 0, with relative tolerance 1e-10 * |h0| |l|.
CommutationCheck commutation_condition(const Eigen::VectorXd& hC, const Eigen::VectorXd& l,
                                       const GeneratorBasis& basis);

enum class CompletionStatus { Exact, NoCompletion };

// Solution of  dh0/dt - (d|h0|/dt / |h0|) h0 = h1 x h0  for h1 on the complement of the constraint set.
struct QBCompletion {
    Eigen::VectorXd particular;               // minimal-norm solution, full length, zero on the constraint set
    std::vector<Eigen::VectorXd> nullspace;   // directions v with v x h0 = 0 (commutant freedom)
    double residual = 0.0;
    CompletionStatus status = CompletionStatus::Exact;
};

// Least squares with singular-value cutoff 1e-10 * sigma_max. The status is
// NoCompletion when the residual exceeds 1e-8 * |dh0/dt|; the least-squares
// solution is still returned. Throws ZeroField for |h0| < 1e-12.
QBCompletion solve_completion(const Eigen::VectorXd& h0, const Eigen::VectorXd& dh0,
                              std::span<const int> constraint_indices, const GeneratorBasis& basis);

// Returns a copy of the protocol with h1 set to the particular completion at each t.
Protocol attach_completion(const Protocol& protocol);

// Two-level closed form h1 = h0 x dh0 / |h0|^2 with the ordinary epsilon cross product
// (Hamiltonian convention H = (1/2) h . sigma).
Eigen::Vector3d solve_h1_n2(const Eigen::Vector3d& h0, const Eigen::Vector3d& dh0);

struct TrajectoryOptions {
    // Coefficient of the k-th nullspace direction at time t. Unset means zero.
    std::function<double(double t, int k)> free_function;
    // When present, the initial invariant (including its scalar offset) must satisfy (1-P)F(1-P) = 0.
    std::optional<State> initial_state;
    double initial_condition_tol = 1e-10;
    double solve_tol = 1e-8;
};

struct QBTrajectory {
    TimeGrid grid;
    std::vector<Eigen::VectorXd> l_path;    // supported on the constraint set, unit norm
    std::vector<Eigen::VectorXd> h1_path;   // supported on the complement
    std::vector<int> nullspace_dim;         // undetermined directions per sample
    std::vector<std::string> free_params;
    double max_offset_residual = 0.0;       // max ||(h x l) off the constraint set||
    double max_rate_residual = 0.0;         // max ||dl/dt - (h x l)|_C|| (central differences)
};

/// Integrates dl/dt = h x l for the invariant direction l restricted to the
/// constraint set. At every evaluation the complement components of h solve the
/// linear system that keeps (h x l) zero off the constraint set, together with
/// the time derivative of any condition that the complement cannot influence.
/// l is advanced by RK4 and renormalized each step.
///
/// Throws NoSolution when the algebraic system is inconsistent and
/// InitialConditionViolated when an initial state is supplied and the invariant
/// does not satisfy the initial condition.
QBTrajectory solve_trajectory(const Protocol& protocol, const Eigen::VectorXd& l0, const TimeGrid& grid,
                              const TrajectoryOptions& options = {});

// kappa + l . X with kappa = (l . e) / sqrt(N-1), e the projector coefficients of psi.
Operator invariant_with_offset(const Eigen::VectorXd& l, const State& psi, const GeneratorBasis& basis);
// ||(1-P) F (1-P)||_F for P = |psi><psi|.
double initial_condition_residual(const Operator& F, const State& psi);

enum class Velocity { Schrodinger, FiniteDifference };

/// Time functional int sqrt(<dpsi|(1-P)|dpsi>) / dE dt over the record (trapezoid).
/// With Velocity::Schrodinger, dpsi = -i H psi; with FiniteDifference it comes
/// from central differences of the stored states. Throws DegenerateSegment when
/// dE < 1e-12 at some sample.
double passage_time(const std::vector<State>& states, const HamiltonianFn& H, const TimeGrid& grid,
                    Velocity velocity = Velocity::Schrodinger);

}  // namespace qbd
