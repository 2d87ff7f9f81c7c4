#include "qbd/driving.hpp"
#include "qbd/dynamics.hpp"
#include "qbd/error.hpp"
#include "qbd/qb.hpp"
#include "qbd/spectral.hpp"
#include "qbd/spin1.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

using namespace qbd;

namespace {

std::shared_ptr<const GeneratorBasis> basis3() {
    static auto b = std::make_shared<const GeneratorBasis>(build_gellmann_basis(3));
    return b;
}
std::shared_ptr<const GeneratorBasis> basis2() {
    static auto b = std::make_shared<const GeneratorBasis>(build_gellmann_basis(2));
    return b;
}

Eigen::VectorXd e(int a, int n = 8) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[a] = 1.0;
    return v;
}

Operator commutator(const Operator& A, const Operator& B) { return A * B - B * A; }

// completion equation residual  dh0 - (d|h0|/|h0|) h0 - h1 x h0
double completion_residual(const Eigen::VectorXd& h0, const Eigen::VectorXd& dh0, const Eigen::VectorXd& h1,
                           const GeneratorBasis& b) {
    const Eigen::VectorXd lhs = dh0 - (h0.dot(dh0) / h0.squaredNorm()) * h0;
    return (lhs - b.structure().cross(h1, h0)).norm();
}

// smooth protocol on {X3, X4, X5}
Eigen::VectorXd hb(double t) {
    return (Eigen::VectorXd(3) << 0.5 * std::cos(0.4 * t) - 0.1, 1.0 + 0.3 * std::sin(t), 0.7 * std::cos(0.9 * t) + 0.4)
        .finished();
}
Eigen::VectorXd dhb(double t) {
    return (Eigen::VectorXd(3) << -0.2 * std::sin(0.4 * t), 0.3 * std::cos(t), -0.63 * std::sin(0.9 * t)).finished();
}

}  // namespace

TEST_CASE("commutation condition") {
    const GeneratorBasis& b3 = *basis3();
    Eigen::VectorXd h = 0.4 * e(0) - 1.3 * e(1) + 0.2 * e(3);
    CHECK(commutation_condition(h, 2.5 * h, b3).commutes);

    const CommutationCheck c2 = commutation_condition(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), *basis2());
    CHECK_FALSE(c2.commutes);
    CHECK(c2.residual == doctest::Approx(2.0));

    const Eigen::VectorXd h45 = 0.6 * e(3) + 0.8 * e(4);
    const Eigen::VectorXd l = 0.3 * e(2) + 0.4 * e(3) - 0.2 * e(4);
    const CommutationCheck c3 = commutation_condition(h45, l, b3);
    const Operator comm = -I * commutator(to_matrix(CoeffVector(h45), b3), to_matrix(CoeffVector(l), b3));
    CHECK(c3.residual == doctest::Approx(to_coeffs(comm, b3).vec.norm()).epsilon(1e-12));
    CHECK_FALSE(c3.commutes);
}

TEST_CASE("completion for constraints {1,2}") {
    const GeneratorBasis& b3 = *basis3();
    const std::vector<int> idx{0, 1};
    const double h1 = 0.8, h2 = -0.3, d1 = 0.25, d2 = 0.9;
    const Eigen::VectorXd h0 = h1 * e(0) + h2 * e(1), dh0 = d1 * e(0) + d2 * e(1);
    const QBCompletion c = solve_completion(h0, dh0, idx, b3);
    CHECK(c.status == CompletionStatus::Exact);
    const double f123 = b3.f(0, 1, 2);
    CHECK(c.particular[2] == doctest::Approx((h1 * d2 - h2 * d1) / (f123 * h0.squaredNorm())).epsilon(1e-12));
    REQUIRE(c.nullspace.size() == 1);
    CHECK(std::abs(std::abs(c.nullspace[0][7]) - 1.0) < 1e-12);
    CHECK(completion_residual(h0, dh0, c.particular, b3) < 1e-9);

    const QBCompletion still = solve_completion(h0, Eigen::VectorXd::Zero(8), idx, b3);
    CHECK(still.particular.norm() < 1e-15);

    CHECK_THROWS_AS(solve_completion(Eigen::VectorXd::Zero(8), dh0, idx, b3), Error);
}

TEST_CASE("completion for constraints {4,5}") {
    const GeneratorBasis& b3 = *basis3();
    const std::vector<int> idx{3, 4};
    const double h4 = 0.6, h5 = 1.1, d4 = -0.4, d5 = 0.3;
    const Eigen::VectorXd h0 = h4 * e(3) + h5 * e(4), dh0 = d4 * e(3) + d5 * e(4);
    const QBCompletion c = solve_completion(h0, dh0, idx, b3);
    CHECK(c.status == CompletionStatus::Exact);
    CHECK(completion_residual(h0, dh0, c.particular, b3) < 1e-9);

    // commutant direction sqrt3 X3 - X8
    REQUIRE(c.nullspace.size() == 1);
    const Eigen::VectorXd v = (std::sqrt(3.0) * e(2) - e(7)) / 2.0;
    CHECK(std::abs(std::abs(c.nullspace[0].dot(v)) - 1.0) < 1e-12);

    // the particular solution lies along (f345, f458) with magnitude fixed by h4 dh5 - h5 dh4
    const double f345 = b3.f(2, 3, 4), f458 = b3.f(3, 4, 7);
    const double w = (h4 * d5 - h5 * d4) / h0.squaredNorm();
    const Eigen::VectorXd want = w * (f345 * e(2) + f458 * e(7)) / (f345 * f345 + f458 * f458);
    CHECK((c.particular - want).norm() < 1e-12);
}

TEST_CASE("completion for constraints {1,2,4} matches the explicit formulas") {
    const GeneratorBasis& b3 = *basis3();
    const std::vector<int> idx{0, 1, 3};
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const double h1 = g(rng), h2 = g(rng), h4 = g(rng), d1 = g(rng), d2 = g(rng), d4 = g(rng);
        const Eigen::VectorXd h0 = h1 * e(0) + h2 * e(1) + h4 * e(3);
        const Eigen::VectorXd dh0 = d1 * e(0) + d2 * e(1) + d4 * e(3);
        const double n2 = h0.squaredNorm();
        const double w = (h1 * d2 - h2 * d1) / n2;
        Eigen::VectorXd want = Eigen::VectorXd::Zero(8);
        want[2] = (1.0 + 1.5 * h4 * h4 / n2) * w / std::sqrt(6.0);
        want[5] = std::sqrt(1.5) * h4 * h1 / n2 * w + std::sqrt(2.0 / 3.0) * (h2 * d4 - h4 * d2) / n2;
        want[6] = -std::sqrt(1.5) * h4 * h2 / n2 * w - std::sqrt(2.0 / 3.0) * (h4 * d1 - h1 * d4) / n2;
        want[7] = -3.0 * std::sqrt(2.0) / 4.0 * h4 * h4 / n2 * w;

        const QBCompletion c = solve_completion(h0, dh0, idx, b3);
        CHECK(c.status == CompletionStatus::Exact);
        Eigen::VectorXd diff = want - c.particular;
        for (const auto& v : c.nullspace) diff -= v.dot(diff) * v;
        CHECK(diff.norm() < 1e-9);
        CHECK(completion_residual(h0, dh0, want, b3) < 1e-9);
        for (const auto& v : c.nullspace) {
            CHECK(b3.structure().cross(v, h0).norm() < 1e-10);
            CHECK(std::abs(v.dot(c.particular)) < 1e-10);
            const Operator HC = to_matrix(CoeffVector(h0), b3);
            CHECK(commutator(to_matrix(CoeffVector(v), b3), HC).norm() < 1e-10);
        }
    }
}

TEST_CASE("constraints {3,4,5} admit no completion") {
    const QBCompletion c = solve_completion(0.3 * e(2) + e(3) + 0.5 * e(4), 0.2 * e(2) - 0.4 * e(3) + 0.9 * e(4),
                                            std::vector<int>{2, 3, 4}, *basis3());
    CHECK(c.status == CompletionStatus::NoCompletion);
}

TEST_CASE("two-level closed form") {
    const double h0 = 1.7, w = 0.35;
    for (double t : {0.0, 1.0, 3.3}) {
        const Eigen::Vector3d h(h0 * std::cos(w * t), h0 * std::sin(w * t), 0.0);
        const Eigen::Vector3d d(-h0 * w * std::sin(w * t), h0 * w * std::cos(w * t), 0.0);
        CHECK((solve_h1_n2(h, d) - Eigen::Vector3d(0, 0, w)).norm() < 1e-14);

        // against the spectral construction with H = (1/2) h . sigma
        const GeneratorBasis& b2 = *basis2();
        const Operator H1 = counter_diabatic(to_matrix(half_pauli_to_coeffs(h), b2), to_matrix(half_pauli_to_coeffs(d), b2));
        CHECK((coeffs_to_half_pauli(to_coeffs(H1, b2)) - solve_h1_n2(h, d)).norm() < 1e-12);
    }
    CHECK(solve_h1_n2(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(2, 4, 6)).norm() < 1e-15);
    CHECK_THROWS_AS(solve_h1_n2(Eigen::Vector3d::Zero(), Eigen::Vector3d(1, 0, 0)), Error);

    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Vector3d h(g(rng), g(rng), 0.0), d(g(rng), g(rng), 0.0);
        const QBCompletion c =
            solve_completion(half_pauli_to_coeffs(h).vec, half_pauli_to_coeffs(d).vec, std::vector<int>{0, 1}, *basis2());
        CHECK((coeffs_to_half_pauli(CoeffVector(c.particular)) - solve_h1_n2(h, d)).norm() < 1e-10);
    }
}

TEST_CASE("trajectory solver, constraints {3,4,5}") {
    const auto b = basis3();
    const Protocol p = make_protocol(b, {2, 3, 4}, hb, dhb);
    const double f345 = b->f(2, 3, 4), f458 = b->f(3, 4, 7);
    for (double theta : {-0.4, 0.0, 0.6}) {
        const Eigen::VectorXd h = hb(0.0);
        const double r = std::hypot(h[1], h[2]);
        const Eigen::VectorXd l0 = std::sin(theta) * e(2) + std::cos(theta) * (h[1] / r * e(3) + h[2] / r * e(4));
        const TimeGrid grid = TimeGrid::span(0.0, 6.0, 2e-3);
        const QBTrajectory tr = solve_trajectory(p, l0, grid);
        double worst = 0.0, others = 0.0, norm = 0.0;
        for (std::size_t k = 0; k < grid.points; ++k) {
            const double t = grid.at(k);
            const Eigen::VectorXd hk = hb(t), dk = dhb(t);
            const double r2 = hk[1] * hk[1] + hk[2] * hk[2];
            const double h8 = f345 / f458 *
                              ((hk[1] * dk[2] - hk[2] * dk[1]) / r2 / f345 - hk[0] + std::sqrt(r2) * std::tan(theta));
            worst = std::max(worst, std::abs(tr.h1_path[k][7] - h8));
            for (int a : {0, 1, 5, 6}) others = std::max(others, std::abs(tr.h1_path[k][a]));
            norm = std::max(norm, std::abs(tr.l_path[k].norm() - 1.0));
        }
        CHECK(worst < 1e-8);
        CHECK(others < 1e-10);
        CHECK(norm < 1e-9);
        CHECK(tr.max_offset_residual < 1e-9);
        CHECK(tr.max_rate_residual < 1e-5);
        CHECK_FALSE(tr.free_params.empty());
    }
}

TEST_CASE("trajectory solver, constraints {1,2}, reproduces the completion") {
    const auto b = basis3();
    const Protocol p = make_protocol(
        b, {0, 1},
        [](double t) { return Eigen::VectorXd((Eigen::VectorXd(2) << std::cos(0.6 * t) + 0.3, std::sin(0.6 * t)).finished()); },
        [](double t) { return Eigen::VectorXd((Eigen::VectorXd(2) << -0.6 * std::sin(0.6 * t), 0.6 * std::cos(0.6 * t)).finished()); });
    const TimeGrid grid = TimeGrid::span(0.0, 5.0, 1e-3);
    const Eigen::VectorXd l0 = p.constraint_coeffs(0.0).vec.normalized();
    const QBTrajectory tr = solve_trajectory(p, l0, grid);
    const std::vector<int> idx{0, 1};
    double worst = 0.0, aligned = 0.0;
    for (std::size_t k = 0; k < grid.points; ++k) {
        const double t = grid.at(k);
        const QBCompletion c = solve_completion(p.constraint_coeffs(t).vec, p.constraint_rate(t).vec, idx, *b);
        worst = std::max(worst, (tr.h1_path[k] - c.particular).norm());
        aligned = std::max(aligned, (tr.l_path[k] - p.constraint_coeffs(t).vec.normalized()).norm());
    }
    CHECK(worst < 1e-8);
    CHECK(aligned < 1e-8);
}

TEST_CASE("trajectory solver, constant field") {
    const Protocol p = make_protocol(
        basis3(), {0, 1}, [](double) { return Eigen::VectorXd((Eigen::VectorXd(2) << 0.6, 0.8).finished()); },
        [](double) { return Eigen::VectorXd(Eigen::VectorXd::Zero(2)); });
    const QBTrajectory tr = solve_trajectory(p, 0.6 * e(0) + 0.8 * e(1), TimeGrid::span(0.0, 1.0, 0.01));
    for (std::size_t k = 0; k < tr.grid.points; ++k) {
        CHECK((tr.l_path[k] - tr.l_path.front()).norm() < 1e-14);
        CHECK(tr.h1_path[k].norm() < 1e-14);
    }
    CHECK(*std::max_element(tr.nullspace_dim.begin(), tr.nullspace_dim.end()) >= 1);
}

TEST_CASE("trajectory solver: initial condition") {
    const auto b = basis3();
    const Protocol p = make_protocol(b, {2, 3, 4}, hb, dhb);
    const Eigen::VectorXd h = hb(0.0);
    const double r = std::hypot(h[1], h[2]);
    auto l_of = [&](double theta) {
        return Eigen::VectorXd(std::sin(theta) * e(2) + std::cos(theta) * (h[1] / r * e(3) + h[2] / r * e(4)));
    };

    // sin(theta) = 1/sqrt3 makes l . X proportional to a rank-one projector plus identity
    const Eigen::VectorXd l_good = l_of(std::asin(1.0 / std::sqrt(3.0)));
    const EigenSystem es = eigh(to_matrix(CoeffVector(l_good), *b));
    CHECK(es.values[1] - es.values[0] < 1e-12);
    const State psi = es.vector(2);
    CHECK(initial_condition_residual(invariant_with_offset(l_good, psi, *b), psi) < 1e-12);

    TrajectoryOptions ok;
    ok.initial_state = psi;
    CHECK_NOTHROW(solve_trajectory(p, l_good, TimeGrid::span(0.0, 0.5, 0.01), ok));

    try {
        solve_trajectory(p, l_of(0.2), TimeGrid::span(0.0, 0.5, 0.01), ok);
        FAIL("expected InitialConditionViolated");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::InitialConditionViolated);
    }

    CHECK_THROWS_AS(solve_trajectory(p, 2.0 * l_good, TimeGrid::span(0.0, 0.5, 0.01)), Error);
    CHECK_THROWS_AS(solve_trajectory(p, e(0), TimeGrid::span(0.0, 0.5, 0.01)), Error);
}

TEST_CASE("passage time") {
    const double omega = 3.14159265358979323846 / 20.0;
    const Protocol p = spin1::rotating_field(1.0, omega);
    const HamiltonianFn H = transitionless_hamiltonian(p);

    SUBCASE("exact trajectory over one period") {
        const TimeGrid grid = TimeGrid::span(0.0, 2.0 * 3.14159265358979323846 / omega, 1e-3);
        const TrajectoryRecord rec = propagate(H, spin1::adiabatic_state(omega, 0.0), grid);
        CHECK(std::abs(passage_time(rec.states, H, grid) - grid.end()) < 1e-6);
        CHECK(std::abs(passage_time(rec.states, H, grid, Velocity::FiniteDifference) - grid.end()) < 1e-4 * grid.end());
    }
    SUBCASE("stationary state") {
        const TimeGrid grid = TimeGrid::span(0.0, 1.0, 0.1);
        const HamiltonianFn H0 = [](double) { return spin1::S1(); };
        const TrajectoryRecord rec = propagate(H0, eigenvector_for(spin1::S1(), 1.0), grid);
        try {
            passage_time(rec.states, H0, grid);
            FAIL("expected DegenerateSegment");
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::DegenerateSegment);
        }
    }
}
