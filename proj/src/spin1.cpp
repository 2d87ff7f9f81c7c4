#include "qbd/spin1.hpp"

#include "qbd/error.hpp"

#include <cmath>
#include <memory>

namespace qbd::spin1 {

namespace {
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
}

Operator S1() {
    Operator m = Operator::Zero(3, 3);
    m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = inv_sqrt2;
    return m;
}

Operator S2() {
    Operator m = Operator::Zero(3, 3);
    m(0, 1) = -I * inv_sqrt2;
    m(1, 0) = I * inv_sqrt2;
    m(1, 2) = -I * inv_sqrt2;
    m(2, 1) = I * inv_sqrt2;
    return m;
}

Operator S3() {
    Operator m = Operator::Zero(3, 3);
    m(0, 0) = 1.0;
    m(2, 2) = -1.0;
    return m;
}

Protocol rotating_field(double h0, double omega) {
    auto basis = std::make_shared<const GeneratorBasis>(build_gellmann_basis(3));
    // S1 = (lambda_1 + lambda_6)/sqrt 2 = (X_1 + X_6)/sqrt 3, likewise S2 with lambda_2, lambda_7.
    const double k = h0 / std::sqrt(3.0);
    auto values = [k, omega](double t) {
        const double c = k * std::cos(omega * t);
        const double s = k * std::sin(omega * t);
        return Eigen::VectorXd((Eigen::VectorXd(4) << c, s, c, s).finished());
    };
    auto rates = [k, omega](double t) {
        const double c = -k * omega * std::sin(omega * t);
        const double s = k * omega * std::cos(omega * t);
        return Eigen::VectorXd((Eigen::VectorXd(4) << c, s, c, s).finished());
    };
    return make_protocol(std::move(basis), {0, 1, 5, 6}, values, rates);
}

State adiabatic_state(double omega, double t) {
    State psi(3);
    psi << 0.5 * std::exp(-I * omega * t), std::sqrt(2.0) / 2.0, 0.5 * std::exp(I * omega * t);
    return psi;
}

std::string_view to_string(PerturbationKind kind) noexcept {
    switch (kind) {
        case PerturbationKind::None: return "none";
        case PerturbationKind::S3: return "s3";
        case PerturbationKind::L4: return "l4";
        case PerturbationKind::L5: return "l5";
        case PerturbationKind::L8: return "l8";
    }
    return "none";
}

std::optional<PerturbationKind> parse_perturbation(std::string_view text) {
    for (auto kind : {PerturbationKind::None, PerturbationKind::S3, PerturbationKind::L4, PerturbationKind::L5,
                      PerturbationKind::L8})
        if (text == to_string(kind)) return kind;
    return std::nullopt;
}

Operator perturbation_operator(PerturbationKind kind) {
    const double c45 = 2.0 * std::sqrt(2.0 / 3.0);
    switch (kind) {
        case PerturbationKind::None: return Operator::Zero(3, 3);
        case PerturbationKind::S3: return S3();
        case PerturbationKind::L4: return c45 * gellmann_matrix(3, 3);
        case PerturbationKind::L5: return c45 * gellmann_matrix(3, 4);
        case PerturbationKind::L8: return (4.0 / 3.0) * gellmann_matrix(3, 7);
    }
    return Operator::Zero(3, 3);
}

Perturbation perturbation(PerturbationKind kind, std::function<double(double)> delta_h) {
    const Operator op = perturbation_operator(kind);
    return Perturbation{std::string(to_string(kind)), [op](double) { return op; }, std::move(delta_h)};
}

std::vector<Perturbation> perturbations(std::function<double(double)> delta_h) {
    std::vector<Perturbation> out;
    for (auto kind : all_perturbations) out.push_back(perturbation(kind, delta_h));
    return out;
}

double instability_closed_form(PerturbationKind kind, double delta_h, double omega, double t) {
    const double unit = delta_h * delta_h / (omega * omega);
    const double s = std::sin(2.0 * omega * t);
    const double c = std::cos(2.0 * omega * t);
    switch (kind) {
        case PerturbationKind::None: return 0.0;
        case PerturbationKind::S3: return unit;
        case PerturbationKind::L4: return -(2.0 / 3.0) * unit * (1.0 + s * s);
        case PerturbationKind::L5: return -(2.0 / 3.0) * unit * (1.0 + c * c);
        case PerturbationKind::L8: return unit;
    }
    fail(ErrorCode::InvalidArgument, "instability_closed_form: unknown perturbation");
}

}  // namespace qbd::spin1
