#pragma once

// Spin-1 particle in a magnetic field rotating in the xy plane:
//   H0(t) = h0 (cos(wt) S1 + sin(wt) S2),  counter-diabatic term w S3.

#include "qbd/protocol.hpp"
#include "qbd/stability.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace qbd::spin1 {

Operator S1();
Operator S2();
Operator S3();

// Rotating-field protocol on the N = 3 Gell-Mann basis (constraint indices of
// lambda_1, lambda_2, lambda_6, lambda_7), with an analytic rate.
Protocol rotating_field(double h0, double omega);

// (1/2)(e^{-iwt}, sqrt 2, e^{iwt}): the +h0 branch followed exactly under H0 + w S3.
State adiabatic_state(double omega, double t);

enum class PerturbationKind { None, S3, L4, L5, L8 };

std::string_view to_string(PerturbationKind kind) noexcept;
std::optional<PerturbationKind> parse_perturbation(std::string_view text);
inline constexpr PerturbationKind all_perturbations[] = {PerturbationKind::S3, PerturbationKind::L4,
                                                          PerturbationKind::L5, PerturbationKind::L8};

// Operator part of delta H: S3, 2 sqrt(2/3) lambda_4, 2 sqrt(2/3) lambda_5, (4/3) lambda_8, or zero.
Operator perturbation_operator(PerturbationKind kind);

// The four perturbations delta_h(t) x {S3, 2 sqrt(2/3) lambda_4, 2 sqrt(2/3) lambda_5, (4/3) lambda_8}.
std::vector<Perturbation> perturbations(std::function<double(double)> delta_h);
Perturbation perturbation(PerturbationKind kind, std::function<double(double)> delta_h);

/// Closed form of instability_cd along adiabatic_state(omega, t), in units of dh^2 / w^2:
///   S3: 1
///   L4: -(2/3)(1 + sin^2 2wt)
///   L5: -(2/3)(1 + cos^2 2wt)
///   L8: +1  (variance term -1 plus coherence term +2; <S3 lambda_8> does not vanish on this state)
double instability_closed_form(PerturbationKind kind, double delta_h, double omega, double t);

}  // namespace qbd::spin1
