#pragma once

#include "qbd/protocol.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qbd {

/// Second-order variation of the time functional under H -> H + dH:
///   I = -(<dH^2> - <dH>^2) / (2 dE^2)
///       + (3/8) (<H dH + dH H> - 2 <dH><H>)^2 / dE^4
/// Throws ZeroVariance when dE <= 1e-10.
double instability_general(const State& psi, const Operator& H, const Operator& dH);

/// Specialization for H = H0 + H1 with psi an eigenstate of H0 and H1 the
/// counter-diabatic term (so <H1> = 0 and dE^2 = <H1^2>):
///   I = -(<dH^2> - <dH>^2) / (2 <H1^2>) + (3/8) <H1 dH + dH H1>^2 / <H1^2>^2
/// Throws PreconditionViolated if |<H1>| >= 1e-10 or <H1^2> <= 1e-12.
double instability_cd(const State& psi, const Operator& H1, const Operator& dH);

struct Perturbation {
    std::string label;
    std::function<Operator(double)> operator_fn;
    std::function<double(double)> amplitude;

    Operator at(double t) const { return amplitude(t) * operator_fn(t); }
};

enum class Stability { Stable, Unstable, Marginal };
std::string_view to_string(Stability s) noexcept;

struct StabilityReport {
    TimeGrid grid;
    std::vector<double> values;
    Stability classification = Stability::Marginal;
};

// Values with |I| <= tol count as zero: all positive -> Stable, any negative -> Unstable, otherwise Marginal.
Stability classify(const std::vector<double>& values, double tol = 1e-12);

// I(t) along the unperturbed adiabatic trajectory of the given branch of H_C,
// with H1 the counter-diabatic term of the protocol.
StabilityReport stability_report(const Protocol& protocol, const Perturbation& perturbation, const TimeGrid& grid,
                                 int branch);

}  // namespace qbd
