#include "qbd/verify.hpp"

#include "qbd/algebra.hpp"
#include "qbd/driving.hpp"
#include "qbd/error.hpp"
#include "qbd/qb.hpp"
#include "qbd/spectral.hpp"
#include "qbd/spin1.hpp"
#include "qbd/stability.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>

namespace qbd {

namespace {

struct Suite {
    std::string name;
    std::vector<CheckResult>* out;

    void check(const std::string& item, bool ok, const std::string& detail = {}) {
        out->push_back({name, item, ok, detail});
    }
    void within(const std::string& item, double err, double tol) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "err=%.3e tol=%.1e", err, tol);
        check(item, std::isfinite(err) && err <= tol, buf);
    }
    void guarded(const std::string& item, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            check(item, false, std::string("exception: ") + e.what());
        }
    }
};

struct TableEntry {
    int a, b, c;
    double value;
};

std::vector<TableEntry> table1() {
    const double s6 = std::sqrt(6.0);
    const double s3 = std::sqrt(3.0);
    return {{1, 2, 3, s6},           {1, 4, 7, s6 / 2},       {1, 5, 6, -s6 / 2},
            {2, 4, 6, s6 / 2},       {2, 5, 7, s6 / 2},       {3, 4, 5, s6 / 2},
            {3, 6, 7, -s6 / 2},      {4, 5, 8, s3 / 2 * s6},  {6, 7, 8, s3 / 2 * s6}};
}

double permutation_sign(int a, int b, int c, const TableEntry& e, bool& match) {
    const int p[6][3] = {{e.a, e.b, e.c}, {e.b, e.c, e.a}, {e.c, e.a, e.b},
                         {e.b, e.a, e.c}, {e.a, e.c, e.b}, {e.c, e.b, e.a}};
    for (int k = 0; k < 6; ++k) {
        if (p[k][0] == a && p[k][1] == b && p[k][2] == c) {
            match = true;
            return k < 3 ? 1.0 : -1.0;
        }
    }
    match = false;
    return 0.0;
}

void algebra_suite(Suite s) {
    const GeneratorBasis basis = build_gellmann_basis(3);
    double table_err = 0.0;
    double rest_err = 0.0;
    const auto table = table1();
    for (int a = 1; a <= 8; ++a)
        for (int b = 1; b <= 8; ++b)
            for (int c = 1; c <= 8; ++c) {
                double expected = 0.0;
                bool tabulated = false;
                for (const auto& e : table) {
                    bool m = false;
                    const double sign = permutation_sign(a, b, c, e, m);
                    if (m) {
                        expected = sign * e.value;
                        tabulated = true;
                    }
                }
                const double err = std::abs(basis.f(a - 1, b - 1, c - 1) - expected);
                (tabulated ? table_err : rest_err) = std::max(tabulated ? table_err : rest_err, err);
            }
    for (const auto& e : table) {
        char name[64];
        std::snprintf(name, sizeof name, "f_%d%d%d", e.a, e.b, e.c);
        s.within(name, std::abs(basis.f(e.a - 1, e.b - 1, e.c - 1) - e.value), 1e-12);
    }
    s.within("table entries under all permutations", table_err, 1e-12);
    s.within("untabulated components vanish", rest_err, 1e-12);

    const GeneratorBasis pauli = build_gellmann_basis(2);
    double eps_err = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                const double eps = (a == b || b == c || a == c) ? 0.0 : ((b - a + 3) % 3 == 1 ? 1.0 : -1.0);
                eps_err = std::max(eps_err, std::abs(pauli.f(a, b, c) - 2.0 * eps));
            }
    s.within("N=2: f = 2 epsilon", eps_err, 1e-12);

    double jacobi = 0.0;
    const int n = basis.size();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double sum = 0.0;
                    for (int e = 0; e < n; ++e)
                        sum += basis.f(a, b, e) * basis.f(e, c, d) + basis.f(c, b, e) * basis.f(a, e, d) +
                               basis.f(d, b, e) * basis.f(a, c, e);
                    jacobi = std::max(jacobi, std::abs(sum));
                }
    s.within("Jacobi identity (N=3)", jacobi, 1e-10);

    // cross product against the commutator -i[h.X, l.X]
    double cross_err = 0.0;
    for (int i = 0; i < 8; ++i) {
        Eigen::VectorXd h(8), l(8);
        for (int a = 0; a < 8; ++a) {
            h[a] = std::sin(1.3 * a + 0.7 * i + 0.1);
            l[a] = std::cos(0.9 * a * a - 0.4 * i);
        }
        const CoeffVector hc(h), lc(l);
        const Operator comm = -I * (to_matrix(hc, basis) * to_matrix(lc, basis) - to_matrix(lc, basis) * to_matrix(hc, basis));
        cross_err = std::max(cross_err, (cross(hc, lc, basis).vec - to_coeffs(comm, basis).vec).norm());
    }
    s.within("cross product equals commutator coefficients", cross_err, 1e-11);

    Eigen::VectorXd e4 = Eigen::VectorXd::Zero(8), e5 = Eigen::VectorXd::Zero(8), want = Eigen::VectorXd::Zero(8);
    e4[3] = 1.0;
    e5[4] = 1.0;
    want[2] = std::sqrt(6.0) / 2.0;
    want[7] = std::sqrt(18.0) / 2.0;
    s.within("e4 x e5", (basis.structure().cross(e4, e5) - want).norm(), 1e-12);
}

// H_C on {X1, X2, X4} with smooth, non-vanishing components.
Eigen::VectorXd k3a_values(double t) {
    return (Eigen::VectorXd(3) << std::cos(0.8 * t) + 0.3, std::sin(0.5 * t) + 1.1, 0.6 + 0.2 * std::cos(1.3 * t))
        .finished();
}
Eigen::VectorXd k3a_rates(double t) {
    return (Eigen::VectorXd(3) << -0.8 * std::sin(0.8 * t), 0.5 * std::cos(0.5 * t), -0.26 * std::sin(1.3 * t))
        .finished();
}

// The explicit h3, h6, h7, h8 for constraints {1,2,4}, returned in full length.
Eigen::VectorXd k3a_formula(double t) {
    const Eigen::VectorXd h = k3a_values(t), d = k3a_rates(t);
    const double h1 = h[0], h2 = h[1], h4 = h[2], d1 = d[0], d2 = d[1], d4 = d[2];
    const double n2 = h.squaredNorm();
    const double w12 = (h1 * d2 - h2 * d1) / n2;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(8);
    out[2] = (1.0 + 1.5 * h4 * h4 / n2) * w12 / std::sqrt(6.0);
    out[5] = std::sqrt(1.5) * h4 * h1 / n2 * w12 + std::sqrt(2.0 / 3.0) * (h2 * d4 - h4 * d2) / n2;
    out[6] = -std::sqrt(1.5) * h4 * h2 / n2 * w12 - std::sqrt(2.0 / 3.0) * (h4 * d1 - h1 * d4) / n2;
    out[7] = -3.0 * std::sqrt(2.0) / 4.0 * h4 * h4 / n2 * w12;
    return out;
}

// H_C on {X3, X4, X5}.
Eigen::VectorXd k3b_values(double t) {
    return (Eigen::VectorXd(3) << 0.4 + 0.3 * std::sin(0.7 * t), 1.2 * std::cos(0.6 * t) + 0.2,
            0.9 * std::sin(0.6 * t) + 0.5)
        .finished();
}
Eigen::VectorXd k3b_rates(double t) {
    return (Eigen::VectorXd(3) << 0.21 * std::cos(0.7 * t), -0.72 * std::sin(0.6 * t), 0.54 * std::cos(0.6 * t))
        .finished();
}

double k3b_h8(double t, double theta, const GeneratorBasis& basis) {
    const Eigen::VectorXd h = k3b_values(t), d = k3b_rates(t);
    const double f345 = basis.f(2, 3, 4), f458 = basis.f(3, 4, 7);
    const double r2 = h[1] * h[1] + h[2] * h[2];
    return f345 / f458 * ((h[1] * d[2] - h[2] * d[1]) / r2 / f345 - h[0] + std::sqrt(r2) * std::tan(theta));
}

Eigen::VectorXd k3b_l0(double theta) {
    const Eigen::VectorXd h = k3b_values(0.0);
    const double r = std::hypot(h[1], h[2]);
    Eigen::VectorXd l = Eigen::VectorXd::Zero(8);
    l[2] = std::sin(theta);
    l[3] = h[1] / r * std::cos(theta);
    l[4] = h[2] / r * std::cos(theta);
    return l;
}

void qb_suite(Suite s) {
    auto basis = std::make_shared<const GeneratorBasis>(build_gellmann_basis(3));

    s.guarded("k=3 {1,2,4}: completion matches explicit formulas modulo nullspace", [&] {
        const Protocol p = make_protocol(basis, {0, 1, 3}, k3a_values, k3a_rates);
        const std::vector<int> idx{0, 1, 3};
        double worst = 0.0;
        for (int i = 0; i <= 20; ++i) {
            const double t = 0.37 * i;
            const QBCompletion c = solve_completion(p.constraint_coeffs(t).vec, p.constraint_rate(t).vec, idx, *basis);
            Eigen::VectorXd diff = k3a_formula(t) - c.particular;
            for (const auto& v : c.nullspace) diff -= v.dot(diff) / v.squaredNorm() * v;
            worst = std::max(worst, diff.norm());
            if (c.status != CompletionStatus::Exact) worst = INFINITY;
        }
        s.within("k=3 {1,2,4}: completion matches explicit formulas modulo nullspace", worst, 1e-9);
    });

    s.guarded("k=3 {3,4,5}: no completion", [&] {
        const Protocol p = make_protocol(basis, {2, 3, 4}, k3b_values, k3b_rates);
        const std::vector<int> idx{2, 3, 4};
        const QBCompletion c = solve_completion(p.constraint_coeffs(0.5).vec, p.constraint_rate(0.5).vec, idx, *basis);
        s.check("k=3 {3,4,5}: no completion", c.status == CompletionStatus::NoCompletion);
    });

    s.guarded("k=3 {3,4,5}: trajectory reproduces h8(theta)", [&] {
        const Protocol p = make_protocol(basis, {2, 3, 4}, k3b_values, k3b_rates);
        const double theta = 0.35;
        const TimeGrid grid = TimeGrid::span(0.0, 4.0, 1e-3);
        const QBTrajectory tr = solve_trajectory(p, k3b_l0(theta), grid);
        double h8 = 0.0, other = 0.0;
        for (std::size_t k = 0; k < grid.points; ++k) {
            const Eigen::VectorXd& h1 = tr.h1_path[k];
            h8 = std::max(h8, std::abs(h1[7] - k3b_h8(grid.at(k), theta, *basis)));
            for (int a : {0, 1, 5, 6}) other = std::max(other, std::abs(h1[a]));
        }
        s.within("k=3 {3,4,5}: trajectory reproduces h8(theta)", h8, 1e-8);
        s.within("k=3 {3,4,5}: h1, h2, h6, h7 vanish", other, 1e-10);
    });

    s.guarded("N=2 closed form matches completion", [&] {
        auto pauli = std::make_shared<const GeneratorBasis>(build_gellmann_basis(2));
        const std::vector<int> idx{0, 2};
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const double t = 0.3 * i;
            const Eigen::Vector3d h(std::cos(t) + 0.2, 0.0, 0.7 * std::sin(2 * t) + 1.0);
            const Eigen::Vector3d d(-std::sin(t), 0.0, 1.4 * std::cos(2 * t));
            const Eigen::Vector3d closed = solve_h1_n2(h, d);
            const QBCompletion c =
                solve_completion(half_pauli_to_coeffs(h).vec, half_pauli_to_coeffs(d).vec, idx, *pauli);
            worst = std::max(worst, (coeffs_to_half_pauli(CoeffVector(c.particular)) - closed).norm());
        }
        s.within("N=2 closed form matches completion", worst, 1e-9);
    });
}

void driving_suite(Suite s) {
    const double omega = 3.14159265358979323846 / 20.0;
    const Protocol p = spin1::rotating_field(1.0, omega);
    s.guarded("spin-1: H1 = omega S3", [&] {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double t = 0.4 * i;
            worst = std::max(worst, (counter_diabatic(p, t) - omega * spin1::S3()).cwiseAbs().maxCoeff());
        }
        s.within("spin-1: H1 = omega S3", worst, 1e-10);
    });
    s.guarded("spin-1: tracked +1 branch equals the adiabatic state", [&] {
        const TimeGrid grid = TimeGrid::span(0.0, 40.0, 0.05);
        const EigenPath path = track_eigenpath(p, grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.points; ++k) {
            const State v = path.systems[k].vector(2);
            worst = std::max(worst, 1.0 - std::abs(v.dot(spin1::adiabatic_state(omega, grid.at(k)))));
        }
        s.within("spin-1: tracked +1 branch equals the adiabatic state", worst, 1e-10);
    });
    s.guarded("spin-1: invariant spectrum is constant", [&] {
        const TimeGrid grid = TimeGrid::span(0.0, 10.0, 1e-3);
        const InvariantReport r = invariant_drift(invariant_from_constraint(p, 0.0), transitionless_hamiltonian(p), grid);
        s.within("spin-1: invariant spectrum is constant", r.max_spectrum_drift, 1e-8);
    });
}

void stability_suite(Suite s) {
    const double omega = 3.14159265358979323846 / 20.0;
    const double dh = 0.5;
    for (auto kind : spin1::all_perturbations) {
        const std::string name = "closed-form I(t), " + std::string(spin1::to_string(kind));
        s.guarded(name, [&] {
            const Operator op = spin1::perturbation_operator(kind);
            double worst = 0.0;
            for (int i = 0; i <= 200; ++i) {
                const double t = 40.0 * i / 200.0;
                const double I_t = instability_cd(spin1::adiabatic_state(omega, t), omega * spin1::S3(), dh * op);
                worst = std::max(worst, std::abs(I_t - spin1::instability_closed_form(kind, dh, omega, t)));
            }
            s.within(name, worst, 1e-8);
        });
    }
    s.guarded("I = c^2 for dH = c H1", [&] {
        const State psi = spin1::adiabatic_state(omega, 3.0);
        const Operator H1 = omega * spin1::S3();
        double worst = 0.0;
        for (double c : {-2.0, -0.3, 0.7, 1.9}) worst = std::max(worst, std::abs(instability_cd(psi, H1, c * H1) - c * c));
        s.within("I = c^2 for dH = c H1", worst, 1e-10);
    });
}

}  // namespace

std::vector<CheckResult> run_verification(std::string_view suite) {
    std::vector<CheckResult> out;
    const bool all = suite == "all";
    bool known = all;
    if (all || suite == "algebra") known = true, algebra_suite({"algebra", &out});
    if (all || suite == "qb") known = true, qb_suite({"qb", &out});
    if (all || suite == "driving") known = true, driving_suite({"driving", &out});
    if (all || suite == "stability") known = true, stability_suite({"stability", &out});
    if (!known) fail(ErrorCode::InvalidArgument, "unknown verification suite '" + std::string(suite) + "'");
    return out;
}

bool print_report(const std::vector<CheckResult>& results, std::ostream& out) {
    bool ok = true;
    for (const auto& r : results) {
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.suite << ": " << r.name;
        if (!r.detail.empty()) out << " (" << r.detail << ")";
        out << '\n';
        ok = ok && r.passed;
    }
    return ok;
}

}  // namespace qbd
