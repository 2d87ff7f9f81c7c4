#pragma once

#include "qbd/algebra.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace qbd {

using CoeffFn = std::function<CoeffVector(double)>;

// Time-dependent Hamiltonian given by its fixed (constraint) components
// h0(t) on a subset of generators, H_C(t) = sum_{a in C} h0_a(t) X_a, plus an
// optional completion h1(t) on the complementary generators.
struct Protocol {
    std::shared_ptr<const GeneratorBasis> basis;
    std::vector<int> constraint_indices;  // zero-based generator indices
    CoeffFn h0;
    CoeffFn dh0;  // analytic derivative of h0; central differences when empty
    CoeffFn h1;   // optional completion
    // h1 may share components with h0 (constraint sets whose internal structure constants do not vanish)
    bool overlapping = false;
    double fd_step = 1e-5;

    int dim() const { return basis->dim(); }
    std::vector<int> complement_indices() const;

    CoeffVector constraint_coeffs(double t) const;
    CoeffVector constraint_rate(double t) const;
    bool has_analytic_rate() const { return static_cast<bool>(dh0); }

    Operator constraint_hamiltonian(double t) const;
    Operator constraint_derivative(double t) const;
    // to_matrix(h1(t)); zero when no completion is attached.
    Operator completion_hamiltonian(double t) const;

    // Throws InvalidArgument when h0 (or h1, unless overlapping) leaks outside its index set at t.
    void validate(double t, double tol = 1e-12) const;
};

// Protocol with h0 = coefficient functions on the listed indices.
Protocol make_protocol(std::shared_ptr<const GeneratorBasis> basis, std::vector<int> constraint_indices,
                       std::function<Eigen::VectorXd(double)> values,
                       std::function<Eigen::VectorXd(double)> rates = {});

}  // namespace qbd
