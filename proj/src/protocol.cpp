#include "qbd/protocol.hpp"

#include "qbd/error.hpp"

#include <algorithm>

namespace qbd {

std::vector<int> Protocol::complement_indices() const {
    std::vector<int> out;
    for (int a = 0; a < basis->size(); ++a)
        if (std::find(constraint_indices.begin(), constraint_indices.end(), a) == constraint_indices.end())
            out.push_back(a);
    return out;
}

CoeffVector Protocol::constraint_coeffs(double t) const { return h0(t); }

CoeffVector Protocol::constraint_rate(double t) const {
    if (dh0) return dh0(t);
    const CoeffVector plus = h0(t + fd_step);
    const CoeffVector minus = h0(t - fd_step);
    return CoeffVector((plus.vec - minus.vec) / (2.0 * fd_step), (plus.scalar - minus.scalar) / (2.0 * fd_step));
}

Operator Protocol::constraint_hamiltonian(double t) const { return to_matrix(constraint_coeffs(t), *basis); }

Operator Protocol::constraint_derivative(double t) const { return to_matrix(constraint_rate(t), *basis); }

Operator Protocol::completion_hamiltonian(double t) const {
    if (!h1) return Operator::Zero(dim(), dim());
    return to_matrix(h1(t), *basis);
}

void Protocol::validate(double t, double tol) const {
    if (!basis) fail(ErrorCode::InvalidArgument, "Protocol: no basis");
    for (int a : constraint_indices)
        if (a < 0 || a >= basis->size()) fail(ErrorCode::InvalidArgument, "Protocol: constraint index out of range");
    const CoeffVector c = h0(t);
    if (c.size() != basis->size()) fail(ErrorCode::DimensionMismatch, "Protocol: h0 length mismatch");
    for (int a : complement_indices())
        if (std::abs(c.vec[a]) > tol) fail(ErrorCode::InvalidArgument, "Protocol: h0 nonzero off the constraint set");
    if (h1 && !overlapping) {
        const CoeffVector d = h1(t);
        for (int a : constraint_indices)
            if (std::abs(d.vec[a]) > tol) fail(ErrorCode::InvalidArgument, "Protocol: h1 overlaps the constraint set");
    }
}

Protocol make_protocol(std::shared_ptr<const GeneratorBasis> basis, std::vector<int> constraint_indices,
                       std::function<Eigen::VectorXd(double)> values, std::function<Eigen::VectorXd(double)> rates) {
    Protocol p;
    const int size = basis->size();
    auto scatter = [size, idx = constraint_indices](const Eigen::VectorXd& v) {
        if (v.size() != static_cast<Eigen::Index>(idx.size()))
            fail(ErrorCode::DimensionMismatch, "make_protocol: value count does not match constraint indices");
        CoeffVector c = CoeffVector::zero(size);
        for (std::size_t i = 0; i < idx.size(); ++i) c.vec[idx[i]] = v[static_cast<Eigen::Index>(i)];
        return c;
    };
    p.h0 = [scatter, values = std::move(values)](double t) { return scatter(values(t)); };
    if (rates) p.dh0 = [scatter, rates = std::move(rates)](double t) { return scatter(rates(t)); };
    p.basis = std::move(basis);
    p.constraint_indices = std::move(constraint_indices);
    return p;
}

}  // namespace qbd
