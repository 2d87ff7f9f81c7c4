#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>

namespace qbd {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

// Dense N x N complex operator. Hermiticity is checked at API boundaries, not by the type.
using Operator = Eigen::MatrixXcd;
// N complex amplitudes.
using State = Eigen::VectorXcd;

using HamiltonianFn = std::function<Operator(double)>;

// Uniform time grid t_k = start + k * step, k = 0 .. points-1.
struct TimeGrid {
    double start = 0.0;
    double step = 1.0;
    std::size_t points = 1;

    double at(std::size_t k) const { return start + static_cast<double>(k) * step; }
    double end() const { return at(points - 1); }
    std::size_t intervals() const { return points - 1; }

    // Grid covering [t0, t1] with spacing as close to dt as divides the span.
    static TimeGrid span(double t0, double t1, double dt);
    TimeGrid reversed() const { return {end(), -step, points}; }
    // Inserts midpoints: 2*intervals+1 points over the same span.
    TimeGrid refined() const { return {start, step / 2.0, 2 * points - 1}; }
};

double hermiticity_defect(const Operator& H);
bool is_hermitian(const Operator& H, double tol = 1e-13);
void require_hermitian(const Operator& H, const char* where, double tol = 1e-13);
void require_square(const Operator& H, const char* where);

}  // namespace qbd
