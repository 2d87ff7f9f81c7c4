#include "qbd/driving.hpp"
#include "qbd/dynamics.hpp"
#include "qbd/error.hpp"
#include "qbd/qb.hpp"
#include "qbd/spin1.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <memory>
#include <random>

using namespace qbd;

namespace {

const double omega = 3.14159265358979323846 / 20.0;

std::shared_ptr<const GeneratorBasis> basis3() {
    static auto b = std::make_shared<const GeneratorBasis>(build_gellmann_basis(3));
    return b;
}
std::shared_ptr<const GeneratorBasis> basis2() {
    static auto b = std::make_shared<const GeneratorBasis>(build_gellmann_basis(2));
    return b;
}

// Two-level sweep on sigma_x, sigma_z: h = (Delta, 0, v t) in the H = (1/2) h . sigma convention.
Protocol landau_zener(double delta, double v) {
    return make_protocol(
        basis2(), {0, 2},
        [=](double t) { return Eigen::VectorXd((Eigen::VectorXd(2) << delta / 2, v * t / 2).finished()); },
        [=](double) { return Eigen::VectorXd((Eigen::VectorXd(2) << 0.0, v / 2).finished()); });
}

}  // namespace

TEST_CASE("counter-diabatic term for the rotating spin-1 field") {
    const Protocol p = spin1::rotating_field(1.0, omega);
    for (int i = 0; i < 20; ++i) {
        const double t = 2.1 * i;
        const Operator H1 = counter_diabatic(p, t);
        CHECK((H1 - omega * spin1::S3()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(hermiticity_defect(H1) < 1e-15);
        const EigenSystem es = eigh(p.constraint_hamiltonian(t));
        for (int n = 0; n < 3; ++n) CHECK(std::abs(es.vector(n).dot(H1 * es.vector(n))) < 1e-10);
    }
}

TEST_CASE("counter-diabatic term: static and two-level cases") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    Operator H(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) H(i, j) = cplx(g(rng), g(rng));
    H = (H + H.adjoint()).eval();
    CHECK(counter_diabatic(H, Operator::Zero(3, 3)).norm() < 1e-15);

    // h = h0 (cos wt, sin wt, 0) with H = (1/2) h . sigma gives H1 = (w/2) sigma_3
    const double h0 = 1.3, w = 0.4;
    const Protocol p = make_protocol(
        basis2(), {0, 1},
        [=](double t) { return Eigen::VectorXd((Eigen::VectorXd(2) << h0 / 2 * std::cos(w * t), h0 / 2 * std::sin(w * t)).finished()); },
        [=](double t) { return Eigen::VectorXd((Eigen::VectorXd(2) << -h0 * w / 2 * std::sin(w * t), h0 * w / 2 * std::cos(w * t)).finished()); });
    Operator want = Operator::Zero(2, 2);
    want(0, 0) = w / 2;
    want(1, 1) = -w / 2;
    for (double t : {0.0, 1.0, 4.5}) CHECK((counter_diabatic(p, t) - want).norm() < 1e-13);

    Operator deg = Operator::Identity(2, 2);
    CHECK_THROWS_AS(counter_diabatic(deg, Operator::Zero(2, 2)), Error);
}

TEST_CASE("off-diagonal coupling") {
    const Protocol p = spin1::rotating_field(1.0, omega);
    const TimeGrid grid = TimeGrid::span(0.0, 10.0, 0.01);
    const EigenPath path = track_eigenpath(p, grid);
    for (std::size_t k = 1; k + 1 < grid.points; k += 97) {
        const cplx an = offdiag_coupling(p, path, 2, 1, k, CouplingMethod::Analytic);
        const cplx fd = offdiag_coupling(p, path, 2, 1, k, CouplingMethod::FiniteDifference);
        CHECK(std::abs(an) == doctest::Approx(omega / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(std::abs(an - fd) < 1e-6);
        const cplx rev = offdiag_coupling(p, path, 1, 2, k, CouplingMethod::Analytic);
        CHECK(std::abs(an + std::conj(rev)) < 1e-12);
    }
    Operator H = Operator::Zero(3, 3);
    H(0, 0) = 1.0;
    H(2, 2) = -1.0;
    const Protocol still = make_protocol(
        basis3(), {2, 7}, [](double) { return Eigen::VectorXd((Eigen::VectorXd(2) << 0.3, 0.2).finished()); },
        [](double) { return Eigen::VectorXd(Eigen::VectorXd::Zero(2)); });
    const EigenPath flat = track_eigenpath(still, grid);
    CHECK(std::abs(offdiag_coupling(still, flat, 0, 1, 5)) < 1e-15);
}

TEST_CASE("Lewis-Riesenfeld phase") {
    SUBCASE("constant Hamiltonian gives the dynamical phase") {
        const Protocol still = make_protocol(
            basis3(), {2, 7}, [](double) { return Eigen::VectorXd((Eigen::VectorXd(2) << 0.3, 0.2).finished()); },
            [](double) { return Eigen::VectorXd(Eigen::VectorXd::Zero(2)); });
        const TimeGrid grid = TimeGrid::span(0.0, 3.0, 0.1);
        const double E = eigh(still.constraint_hamiltonian(0.0)).values[1];
        const auto alpha = lr_phase(still, 1, grid);
        CHECK(alpha.front() == 0.0);
        for (std::size_t k = 0; k < grid.points; ++k) CHECK(alpha[k] == doctest::Approx(-E * grid.at(k)).epsilon(1e-12));
    }
    SUBCASE("spin-1: assembled state matches propagation") {
        const Protocol p = spin1::rotating_field(1.0, omega);
        const TimeGrid grid = TimeGrid::span(0.0, 20.0, 0.01);
        const std::array<double, 3> c{0.0, 0.0, 1.0};
        const AdiabaticSolution sol = adiabatic_state(p, c, grid);
        const TrajectoryRecord rec = propagate(transitionless_hamiltonian(p), sol.states.front(), grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.points; ++k)
            worst = std::max(worst, (sol.states[k] - rec.states[k]).norm());
        CHECK(worst < 1e-5);
        // phase is linear in t
        const auto& a = sol.phases[2];
        const double slope = a.back() / grid.end();
        for (std::size_t k = 0; k < grid.points; k += 50) CHECK(std::abs(a[k] - slope * grid.at(k)) < 1e-8);
        CHECK(fidelity(sol.states.back(), spin1::adiabatic_state(omega, grid.end())) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("gauge shift moves the phase but not the state") {
        const Protocol p = spin1::rotating_field(1.0, omega);
        const TimeGrid grid = TimeGrid::span(0.0, 5.0, 0.01);
        EigenPath path = track_eigenpath(p, grid);
        const auto alpha = lr_phase(path, 2, transitionless_hamiltonian(p));
        EigenPath shifted = path;
        auto chi = [](double t) { return 0.3 * t * t; };
        for (std::size_t k = 0; k < grid.points; ++k) shifted.systems[k].vectors.col(2) *= std::exp(I * chi(grid.at(k)));
        const auto beta = lr_phase(shifted, 2, transitionless_hamiltonian(p));
        for (std::size_t k = 0; k < grid.points; k += 25) {
            const State a = std::exp(I * alpha[k]) * path.systems[k].vector(2);
            const State b = std::exp(I * beta[k]) * shifted.systems[k].vector(2);
            CHECK((a - b).norm() < 1e-6);
        }
    }
}

TEST_CASE("adiabatic state") {
    SUBCASE("single branch of a constant H is stationary up to phase") {
        const Protocol still = make_protocol(
            basis3(), {2, 7}, [](double) { return Eigen::VectorXd((Eigen::VectorXd(2) << 0.3, 0.2).finished()); },
            [](double) { return Eigen::VectorXd(Eigen::VectorXd::Zero(2)); });
        const std::array<double, 3> c{1.0, 0.0, 0.0};
        const AdiabaticSolution sol = adiabatic_state(still, c, TimeGrid::span(0.0, 2.0, 0.1));
        for (const auto& s : sol.states) CHECK(fidelity(s, sol.states.front()) == doctest::Approx(1.0));
    }
    SUBCASE("equal superposition through a two-level sweep") {
        const Protocol p = landau_zener(0.8, 1.5);
        const TimeGrid grid = TimeGrid::span(-4.0, 4.0, 1e-3);
        const std::array<double, 2> c{std::sqrt(0.5), std::sqrt(0.5)};
        const AdiabaticSolution sol = adiabatic_state(p, c, grid);
        const TrajectoryRecord rec = propagate(transitionless_hamiltonian(p), sol.states.front(), grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.points; k += 10) {
            CHECK(std::abs(sol.states[k].norm() - 1.0) < 1e-10);
            worst = std::max(worst, 1.0 - fidelity(sol.states[k], rec.states[k]));
        }
        CHECK(worst < 1e-6);

        // populations of every branch stay fixed
        const EigenPath path = track_eigenpath(p, grid);
        for (int n = 0; n < 2; ++n)
            for (std::size_t k = 0; k < grid.points; k += 500)
                CHECK(std::abs(std::norm(path.systems[k].vector(n).dot(rec.states[k])) - 0.5) < 1e-6);
    }
    SUBCASE("weights must be normalized") {
        const std::array<double, 3> c{0.5, 0.5, 0.0};
        CHECK_THROWS_AS(adiabatic_state(spin1::rotating_field(1.0, omega), c, TimeGrid::span(0, 1, 0.1)), Error);
    }
}

TEST_CASE("invariant drift") {
    const Protocol p = spin1::rotating_field(1.0, omega);
    const HamiltonianFn H = transitionless_hamiltonian(p);

    SUBCASE("F proportional to H_C keeps its spectrum") {
        const InvariantReport r = invariant_drift(invariant_from_constraint(p, 0.0), H, TimeGrid::span(0.0, 40.0, 1e-3));
        CHECK(r.max_spectrum_drift < 1e-8);
    }
    SUBCASE("identity has no drift") {
        const InvariantReport r = invariant_drift(Operator::Identity(3, 3), H, TimeGrid::span(0.0, 10.0, 1e-2));
        CHECK(r.max_spectrum_drift == 0.0);
    }
    SUBCASE("random F under a random protocol") {
        std::mt19937_64 rng(21);
        std::normal_distribution<double> g;
        Operator F(3, 3), A(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                F(i, j) = cplx(g(rng), g(rng));
                A(i, j) = cplx(g(rng), g(rng));
            }
        F = (F + F.adjoint()).eval();
        A = (A + A.adjoint()).eval();
        const InvariantReport r =
            invariant_drift(F, [&](double t) -> Operator { return std::cos(t) * A + H(t); }, TimeGrid::span(0.0, 5.0, 1e-3));
        CHECK(r.max_spectrum_drift < 1e-8);
    }
    SUBCASE("F(t) commutes with H0(t)") {
        // a short horizon with a fine step keeps the integrator error well below the tolerance
        const TimeGrid grid = TimeGrid::span(0.0, 2.0, 1e-4);
        const TrajectoryRecord rec = propagate(H, spin1::adiabatic_state(omega, 0.0), grid);
        const Operator F0 = invariant_from_constraint(p, 0.0);
        Operator U = Operator::Identity(3, 3);
        double worst = 0.0;
        for (std::size_t k = 0; k + 1 < grid.points; ++k) {
            U = step_propagator(H(grid.at(k) + grid.step / 2), grid.step) * U;
            const Operator F = U * F0 * U.adjoint();
            const Operator H0 = p.constraint_hamiltonian(grid.at(k + 1));
            worst = std::max(worst, (F * H0 - H0 * F).norm());
        }
        CHECK(worst < 1e-9);
    }
    SUBCASE("initial condition check reports the residual") {
        const InvariantReport r = invariant_drift(invariant_from_constraint(p, 0.0), H, TimeGrid::span(0.0, 1.0, 1e-2),
                                                  spin1::adiabatic_state(omega, 0.0));
        REQUIRE(r.initial_condition_residual.has_value());
        REQUIRE(r.max_condition_residual.has_value());
        CHECK(std::abs(*r.max_condition_residual - *r.initial_condition_residual) < 1e-10);
    }
}

TEST_CASE("counter-diabatic term solves the completion equation") {
    // constraints {1,2} with l proportional to h0: H1 off the constraint set solves the completion equation
    const Protocol p = make_protocol(
        basis3(), {0, 1},
        [](double t) { return Eigen::VectorXd((Eigen::VectorXd(2) << std::cos(t) + 0.2, 0.8 * std::sin(0.7 * t) + 0.6).finished()); },
        [](double t) { return Eigen::VectorXd((Eigen::VectorXd(2) << -std::sin(t), 0.56 * std::cos(0.7 * t)).finished()); });
    const std::vector<int> idx{0, 1};
    for (double t : {0.0, 0.9, 2.3}) {
        const CoeffVector h1 = to_coeffs(counter_diabatic(p, t), *basis3());
        const Eigen::VectorXd h0 = p.constraint_coeffs(t).vec, dh0 = p.constraint_rate(t).vec;
        Eigen::VectorXd h1c = h1.vec;
        h1c[0] = h1c[1] = 0.0;
        const Eigen::VectorXd lhs = dh0 - (h0.dot(dh0) / h0.squaredNorm()) * h0;
        CHECK((lhs - basis3()->structure().cross(h1c, h0)).norm() < 1e-9);
    }
}
