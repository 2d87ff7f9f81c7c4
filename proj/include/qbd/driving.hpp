#pragma once

#include "qbd/protocol.hpp"
#include "qbd/spectral.hpp"

#include <optional>
#include <span>
#include <vector>

namespace qbd {

/// Counter-diabatic term H1 = i sum_{m != n} |m><m|dn/dt><n| for the
/// instantaneous eigenbasis of H0, with <m|dn/dt> = <m|dH0/dt|n> / (E_n - E_m).
/// Throws NearDegeneracy if two eigenvalues of H0 are closer than gap_tol.
Operator counter_diabatic(const Operator& H0, const Operator& dH0, double gap_tol = 1e-8);
Operator counter_diabatic(const Protocol& protocol, double t, double gap_tol = 1e-8);

// H_C(t) + H1(t).
HamiltonianFn transitionless_hamiltonian(const Protocol& protocol, double gap_tol = 1e-8);

enum class CouplingMethod { Auto, Analytic, FiniteDifference };

// <m(t_k)|dn/dt(t_k)> on the tracked path. Auto uses the gap formula when the
// protocol carries an analytic rate, otherwise central differences of the path.
cplx offdiag_coupling(const Protocol& protocol, const EigenPath& path, int m, int n, std::size_t k,
                      CouplingMethod method = CouplingMethod::Auto);

/// Phase alpha_n(t) = int_0^t <n|(i d/dt - H)|n> dt' on the gauge of the supplied path.
/// The connection term uses -arg<n(t_k)|n(t_k+1)> per interval; the energy term
/// is trapezoidal. alpha_n(t_0) = 0.
std::vector<double> lr_phase(const EigenPath& path, int branch, const HamiltonianFn& H);

// Tracks H_C and integrates the phase for H = H_C + H1 (or the supplied H),
// doubling the grid until the phase changes by less than refine_tol. Values are
// returned on the input grid.
std::vector<double> lr_phase(const Protocol& protocol, int branch, const TimeGrid& grid,
                             const HamiltonianFn& H = {}, double refine_tol = 1e-8);

struct AdiabaticSolution {
    TimeGrid grid;
    std::vector<double> weights;              // c_n, time independent
    std::vector<std::vector<double>> phases;  // alpha_n(t_k), per branch
    std::vector<State> states;
    EigenPath path;
};

// |psi(t)> = sum_n c_n e^{i alpha_n(t)} |n(t)>, on the tracked eigenbasis of H_C.
// Requires sum c_n^2 = 1 within 1e-10.
AdiabaticSolution adiabatic_state(const Protocol& protocol, std::span<const double> weights, const TimeGrid& grid,
                                  const HamiltonianFn& H = {});

struct InvariantReport {
    double max_spectrum_drift = 0.0;
    // ||(1-P)F(1-P)||_F at t_0 and its maximum along the run; present when a state was supplied.
    std::optional<double> initial_condition_residual;
    std::optional<double> max_condition_residual;
};

// Propagates F(t) = U F(0) U^dagger with the exponential midpoint rule and reports the
// spectral drift. When psi0 is given, also propagates P = |psi><psi| and checks (1-P)F(1-P) = 0.
InvariantReport invariant_drift(const Operator& F0, const HamiltonianFn& H, const TimeGrid& grid,
                                const std::optional<State>& psi0 = std::nullopt);

// F = H_C(t) / |h0(t)|, the invariant associated with l proportional to h0. The
// scalar offset is dropped and the overall scale is irrelevant to every check.
Operator invariant_from_constraint(const Protocol& protocol, double t);

}  // namespace qbd
