#pragma once

#include "qbd/types.hpp"

#include <memory>
#include <vector>

namespace qbd {

// Real antisymmetric tensor f_abc of [X_a, X_b] = i sum_c f_abc X_c, stored densely.
class StructureTensor {
public:
    StructureTensor() = default;
    explicit StructureTensor(int size) : size_(size), data_(static_cast<std::size_t>(size) * size * size, 0.0) {}

    int size() const { return size_; }
    double operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }
    double& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }

    // (h x l)_a = sum_bc f_abc h_b l_c
    Eigen::VectorXd cross(const Eigen::VectorXd& h, const Eigen::VectorXd& l) const;
    // Matrix M with M * l == cross(h, l).
    Eigen::MatrixXd left_cross_matrix(const Eigen::VectorXd& h) const;

private:
    std::size_t index(int a, int b, int c) const {
        return (static_cast<std::size_t>(a) * size_ + b) * size_ + c;
    }

    int size_ = 0;
    std::vector<double> data_;
};

// f_abc = Tr([X_a, X_b] X_c) / (i N). Throws NonClosedBasis if an imaginary residue exceeds 1e-10.
StructureTensor structure_constants(const std::vector<Operator>& generators);

/// Orthonormal traceless Hermitian generators X_1..X_{N^2-1} of su(N), with
/// (1/N) Tr(X_a X_b) = delta_ab. The identity X_0 is implicit.
///
/// Generator indices are zero based throughout the library: generator(a)
/// carries the conventional label a+1, so generator(0) is the scaled lambda_1.
class GeneratorBasis {
public:
    // Validates Hermiticity, tracelessness and orthonormality, then computes f.
    explicit GeneratorBasis(std::vector<Operator> generators);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(generators_.size()); }
    const Operator& generator(int a) const { return generators_.at(static_cast<std::size_t>(a)); }
    const std::vector<Operator>& generators() const { return generators_; }
    const StructureTensor& structure() const { return f_; }
    double f(int a, int b, int c) const { return f_(a, b, c); }

private:
    int dim_;
    std::vector<Operator> generators_;
    StructureTensor f_;
};

/// Generalized Gell-Mann matrices scaled by sqrt(N/2).
///
/// N = 2 gives the Pauli matrices. N = 3 uses the standard lambda_1..lambda_8
/// ordering (so X_a = (sqrt 6 / 2) lambda_{a+1}). Other N order the symmetric
/// off-diagonal pairs row-major, then the antisymmetric pairs, then the diagonal
/// generators.
GeneratorBasis build_gellmann_basis(int N);

// Unscaled generalized Gell-Mann matrix in the same ordering (Tr(lambda_a lambda_b) = 2 delta_ab).
Operator gellmann_matrix(int N, int a);

// Operator = scalar * 1 + vec . X
struct CoeffVector {
    double scalar = 0.0;
    Eigen::VectorXd vec;

    CoeffVector() = default;
    explicit CoeffVector(Eigen::VectorXd v, double s = 0.0) : scalar(s), vec(std::move(v)) {}
    static CoeffVector zero(int size) { return CoeffVector(Eigen::VectorXd::Zero(size)); }

    int size() const { return static_cast<int>(vec.size()); }
    double norm() const { return vec.norm(); }
};

CoeffVector cross(const CoeffVector& h, const CoeffVector& l, const GeneratorBasis& basis);

Operator to_matrix(const CoeffVector& c, const GeneratorBasis& basis);
// h_a = (1/N) Tr(H X_a), h_0 = (1/N) Tr H. Throws NonHermitian.
CoeffVector to_coeffs(const Operator& H, const GeneratorBasis& basis);

// Unit vector e with |psi><psi| = 1/N + (sqrt(N-1)/N) e . X.
CoeffVector projector_coeffs(const State& psi, const GeneratorBasis& basis);
Operator projector_from_coeffs(const CoeffVector& e, const GeneratorBasis& basis);

// For N = 2 the Hamiltonian is often written H = (1/2) h . sigma. Against the
// normalized basis (X = sigma) this is the coefficient vector h / 2; these two
// helpers convert between the conventions.
CoeffVector half_pauli_to_coeffs(const Eigen::Vector3d& h);
Eigen::Vector3d coeffs_to_half_pauli(const CoeffVector& c);

}  // namespace qbd
