#include "qbd/algebra.hpp"

#include "qbd/error.hpp"

#include <cmath>
#include <string>

namespace qbd {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonHermitian: return "NonHermitian";
        case ErrorCode::NonClosedBasis: return "NonClosedBasis";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::NearDegeneracy: return "NearDegeneracy";
        case ErrorCode::AmbiguousTracking: return "AmbiguousTracking";
        case ErrorCode::ZeroField: return "ZeroField";
        case ErrorCode::NoSolution: return "NoSolution";
        case ErrorCode::InitialConditionViolated: return "InitialConditionViolated";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::NoSuchEigenvalue: return "NoSuchEigenvalue";
        case ErrorCode::DegenerateEigenvalue: return "DegenerateEigenvalue";
        case ErrorCode::DegenerateSegment: return "DegenerateSegment";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::Validation: return "Validation";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

TimeGrid TimeGrid::span(double t0, double t1, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::InvalidArgument, "TimeGrid::span: dt must be positive");
    const double length = std::abs(t1 - t0);
    if (length == 0.0) return {t0, dt, 1};
    const auto intervals = static_cast<std::size_t>(std::max(1.0, std::round(length / dt)));
    return {t0, (t1 - t0) / static_cast<double>(intervals), intervals + 1};
}

double hermiticity_defect(const Operator& H) {
    if (H.size() == 0) return 0.0;
    return (H - H.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Operator& H, double tol) {
    if (H.rows() != H.cols()) return false;
    if (H.size() == 0) return true;
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    return hermiticity_defect(H) <= tol * scale;
}

void require_square(const Operator& H, const char* where) {
    if (H.rows() != H.cols() || H.rows() == 0)
        fail(ErrorCode::DimensionMismatch, std::string(where) + ": operator must be square and nonempty");
}

void require_hermitian(const Operator& H, const char* where, double tol) {
    require_square(H, where);
    if (!is_hermitian(H, tol))
        fail(ErrorCode::NonHermitian,
             std::string(where) + ": operator is not Hermitian (defect " + std::to_string(hermiticity_defect(H)) + ")");
}

// ---------------------------------------------------------------------------

Eigen::VectorXd StructureTensor::cross(const Eigen::VectorXd& h, const Eigen::VectorXd& l) const {
    if (h.size() != size_ || l.size() != size_)
        fail(ErrorCode::DimensionMismatch, "cross: vector length does not match basis");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(size_);
    for (int a = 0; a < size_; ++a) {
        double acc = 0.0;
        for (int b = 0; b < size_; ++b) {
            if (h[b] == 0.0) continue;
            for (int c = 0; c < size_; ++c) acc += (*this)(a, b, c) * h[b] * l[c];
        }
        out[a] = acc;
    }
    return out;
}

Eigen::MatrixXd StructureTensor::left_cross_matrix(const Eigen::VectorXd& h) const {
    if (h.size() != size_) fail(ErrorCode::DimensionMismatch, "left_cross_matrix: vector length does not match basis");
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(size_, size_);
    for (int a = 0; a < size_; ++a)
        for (int b = 0; b < size_; ++b) {
            if (h[b] == 0.0) continue;
            for (int c = 0; c < size_; ++c) M(a, c) += (*this)(a, b, c) * h[b];
        }
    return M;
}

StructureTensor structure_constants(const std::vector<Operator>& generators) {
    const int size = static_cast<int>(generators.size());
    if (size == 0) fail(ErrorCode::EmptyInput, "structure_constants: no generators");
    const auto N = generators.front().rows();
    for (const auto& X : generators)
        if (X.rows() != N || X.cols() != N) fail(ErrorCode::DimensionMismatch, "structure_constants: mixed sizes");

    StructureTensor f(size);
    for (int a = 0; a < size; ++a) {
        for (int b = a + 1; b < size; ++b) {
            const Operator comm = generators[a] * generators[b] - generators[b] * generators[a];
            for (int c = 0; c < size; ++c) {
                // Tr(comm * X_c) without forming the product
                const cplx tr = (comm.array() * generators[c].transpose().array()).sum();
                const cplx value = tr / (I * static_cast<double>(N));
                if (std::abs(value.imag()) > 1e-10)
                    fail(ErrorCode::NonClosedBasis, "structure_constants: imaginary residue " +
                                                        std::to_string(value.imag()));
                f(a, b, c) = value.real();
                f(b, a, c) = -value.real();
            }
        }
    }
    return f;
}

GeneratorBasis::GeneratorBasis(std::vector<Operator> generators) : generators_(std::move(generators)) {
    if (generators_.empty()) fail(ErrorCode::EmptyInput, "GeneratorBasis: no generators");
    dim_ = static_cast<int>(generators_.front().rows());
    if (dim_ < 2) fail(ErrorCode::InvalidArgument, "GeneratorBasis: dimension must be >= 2");
    if (size() != dim_ * dim_ - 1)
        fail(ErrorCode::DimensionMismatch, "GeneratorBasis: expected N^2-1 generators");
    for (const auto& X : generators_) {
        if (X.rows() != dim_ || X.cols() != dim_) fail(ErrorCode::DimensionMismatch, "GeneratorBasis: mixed sizes");
        if (hermiticity_defect(X) >= 1e-14) fail(ErrorCode::NonHermitian, "GeneratorBasis: generator not Hermitian");
        if (std::abs(X.trace()) >= 1e-14) fail(ErrorCode::InvalidArgument, "GeneratorBasis: generator not traceless");
    }
    for (int a = 0; a < size(); ++a)
        for (int b = a; b < size(); ++b) {
            const cplx g = (generators_[a] * generators_[b]).trace() / static_cast<double>(dim_);
            if (std::abs(g - (a == b ? 1.0 : 0.0)) > 1e-12)
                fail(ErrorCode::InvalidArgument, "GeneratorBasis: generators are not orthonormal");
        }
    f_ = structure_constants(generators_);
}

namespace {

enum class Kind { Symmetric, Antisymmetric, Diagonal };

struct GeneratorSpec {
    Kind kind;
    int j;  // row (or diagonal level l for Diagonal)
    int k;
};

std::vector<GeneratorSpec> gellmann_layout(int N) {
    std::vector<GeneratorSpec> layout;
    if (N == 3) {
        // lambda_1 .. lambda_8
        layout = {{Kind::Symmetric, 0, 1},     {Kind::Antisymmetric, 0, 1}, {Kind::Diagonal, 1, 0},
                  {Kind::Symmetric, 0, 2},     {Kind::Antisymmetric, 0, 2}, {Kind::Symmetric, 1, 2},
                  {Kind::Antisymmetric, 1, 2}, {Kind::Diagonal, 2, 0}};
        return layout;
    }
    for (int j = 0; j < N; ++j)
        for (int k = j + 1; k < N; ++k) layout.push_back({Kind::Symmetric, j, k});
    for (int j = 0; j < N; ++j)
        for (int k = j + 1; k < N; ++k) layout.push_back({Kind::Antisymmetric, j, k});
    for (int l = 1; l < N; ++l) layout.push_back({Kind::Diagonal, l, 0});
    return layout;
}

Operator make_gellmann(int N, const GeneratorSpec& g) {
    Operator m = Operator::Zero(N, N);
    switch (g.kind) {
        case Kind::Symmetric:
            m(g.j, g.k) = 1.0;
            m(g.k, g.j) = 1.0;
            break;
        case Kind::Antisymmetric:
            m(g.j, g.k) = -I;
            m(g.k, g.j) = I;
            break;
        case Kind::Diagonal: {
            const int l = g.j;
            const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
            for (int i = 0; i < l; ++i) m(i, i) = scale;
            m(l, l) = -l * scale;
            break;
        }
    }
    return m;
}

}  // namespace

Operator gellmann_matrix(int N, int a) {
    if (N < 2) fail(ErrorCode::InvalidArgument, "gellmann_matrix: N must be >= 2");
    const auto layout = gellmann_layout(N);
    if (a < 0 || a >= static_cast<int>(layout.size())) fail(ErrorCode::InvalidArgument, "gellmann_matrix: bad index");
    return make_gellmann(N, layout[static_cast<std::size_t>(a)]);
}

GeneratorBasis build_gellmann_basis(int N) {
    if (N < 2) fail(ErrorCode::InvalidArgument, "build_gellmann_basis: N must be >= 2");
    const double scale = std::sqrt(N / 2.0);
    std::vector<Operator> gens;
    for (const auto& g : gellmann_layout(N)) gens.push_back(scale * make_gellmann(N, g));
    return GeneratorBasis(std::move(gens));
}

// ---------------------------------------------------------------------------

CoeffVector cross(const CoeffVector& h, const CoeffVector& l, const GeneratorBasis& basis) {
    return CoeffVector(basis.structure().cross(h.vec, l.vec));
}

Operator to_matrix(const CoeffVector& c, const GeneratorBasis& basis) {
    if (c.size() != basis.size()) fail(ErrorCode::DimensionMismatch, "to_matrix: coefficient length mismatch");
    Operator H = c.scalar * Operator::Identity(basis.dim(), basis.dim());
    for (int a = 0; a < basis.size(); ++a)
        if (c.vec[a] != 0.0) H += c.vec[a] * basis.generator(a);
    return H;
}

CoeffVector to_coeffs(const Operator& H, const GeneratorBasis& basis) {
    if (H.rows() != basis.dim() || H.cols() != basis.dim())
        fail(ErrorCode::DimensionMismatch, "to_coeffs: operator size mismatch");
    require_hermitian(H, "to_coeffs");
    const double N = basis.dim();
    CoeffVector c = CoeffVector::zero(basis.size());
    c.scalar = H.trace().real() / N;
    for (int a = 0; a < basis.size(); ++a)
        c.vec[a] = (H.array() * basis.generator(a).transpose().array()).sum().real() / N;
    return c;
}

CoeffVector projector_coeffs(const State& psi, const GeneratorBasis& basis) {
    if (psi.size() != basis.dim()) fail(ErrorCode::DimensionMismatch, "projector_coeffs: state size mismatch");
    const double norm = psi.norm();
    if (norm < 1e-300) fail(ErrorCode::InvalidArgument, "projector_coeffs: zero-norm state");
    const State u = psi / norm;
    const double root = std::sqrt(basis.dim() - 1.0);
    CoeffVector e = CoeffVector::zero(basis.size());
    for (int a = 0; a < basis.size(); ++a) e.vec[a] = u.dot(basis.generator(a) * u).real() / root;
    return e;
}

Operator projector_from_coeffs(const CoeffVector& e, const GeneratorBasis& basis) {
    const double N = basis.dim();
    CoeffVector scaled(e.vec * (std::sqrt(N - 1.0) / N), 1.0 / N);
    return to_matrix(scaled, basis);
}

CoeffVector half_pauli_to_coeffs(const Eigen::Vector3d& h) { return CoeffVector(Eigen::VectorXd(h / 2.0)); }

Eigen::Vector3d coeffs_to_half_pauli(const CoeffVector& c) {
    if (c.size() != 3) fail(ErrorCode::DimensionMismatch, "coeffs_to_half_pauli: expected 3 components");
    return 2.0 * c.vec;
}

}  // namespace qbd
