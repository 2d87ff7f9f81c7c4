#pragma once

#include "qbd/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace qbd {

struct TrajectoryRecord {
    TimeGrid grid;
    std::vector<State> states;
    std::map<std::string, std::vector<double>> scalars;  // optional per-sample series
};

// exp(-i dt H) through the eigendecomposition of H.
Operator step_propagator(const Operator& H, double dt);

// Exponential midpoint rule: psi(t+dt) = exp(-i dt H(t+dt/2)) psi(t).
TrajectoryRecord propagate(const HamiltonianFn& H, const State& psi0, const TimeGrid& grid);

double fidelity(const State& a, const State& b);
double expectation(const State& psi, const Operator& A);
// <H^2> - <H>^2, evaluated as ||(H - <H>) psi||^2 so it never goes negative.
double energy_variance(const State& psi, const Operator& H);
// |<a|psi>|^2 for the eigenvector of A with the given (nondegenerate) eigenvalue.
double eigen_probability(const State& psi, const Operator& A, double eigenvalue, double tol = 1e-8);
// Eigenvector of A for the given eigenvalue (same matching rules as eigen_probability).
State eigenvector_for(const Operator& A, double eigenvalue, double tol = 1e-8);

void require_unit_norm(const State& psi, const char* where, double tol = 1e-10);

}  // namespace qbd
