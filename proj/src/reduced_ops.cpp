#include "alp/reduced_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace alp {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MutableUnfolding = Eigen::Map<RowMajorMatrix>;

}  // namespace

double Tensor3::frobenius_norm() const
{
    return std::sqrt(dot(*this));
}

double Tensor3::dot(const Tensor3& other) const
{
    if (other.n_ != n_)
        throw std::invalid_argument("Tensor3::dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i)
        s += data_[i] * other.data_[i];
    return s;
}

double Tensor3::symmetry_defect() const
{
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i)
        for (Eigen::Index j = 0; j < n_; ++j)
            for (Eigen::Index k = 0; k < n_; ++k) {
                const double v = (*this)(i, j, k);
                worst = std::max({worst, std::abs(v - (*this)(i, k, j)), std::abs(v - (*this)(j, i, k)),
                                  std::abs(v - (*this)(j, k, i)), std::abs(v - (*this)(k, i, j)),
                                  std::abs(v - (*this)(k, j, i))});
            }
    return worst;
}

void Tensor3::symmetrize()
{
    for (Eigen::Index i = 0; i < n_; ++i)
        for (Eigen::Index j = i; j < n_; ++j)
            for (Eigen::Index k = j; k < n_; ++k) {
                const std::array<std::size_t, 6> idx = {index(i, j, k), index(i, k, j), index(j, i, k),
                                                        index(j, k, i), index(k, i, j), index(k, j, i)};
                double mean = 0.0;
                for (auto p : idx)
                    mean += data_[p];
                mean /= 6.0;
                for (auto p : idx)
                    data_[p] = mean;
            }
}

Tensor3& Tensor3::axpy(double s, const Tensor3& other)
{
    if (other.n_ != n_)
        throw std::invalid_argument("Tensor3::axpy: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += s * other.data_[i];
    return *this;
}

Tensor3& Tensor3::operator*=(double s)
{
    for (auto& v : data_)
        v *= s;
    return *this;
}

std::string_view to_string(AuxKind kind)
{
    switch (kind) {
    case AuxKind::D:
        return "D";
    case AuxKind::D3:
        return "D3";
    }
    return "?";
}

ModeSamples sample_modes(const FemOperators& fem, const Matrix& B)
{
    if (B.rows() != fem.n_active())
        throw std::invalid_argument("sample_modes: basis rows do not match active nodes");
    const auto nq = static_cast<Eigen::Index>(fem.cubature.size());
    ModeSamples s;
    s.weights.resize(nq);
    s.values = Matrix::Zero(nq, B.cols());
    s.dx = Matrix::Zero(nq, B.cols());
    for (Eigen::Index q = 0; q < nq; ++q) {
        const auto& qp = fem.cubature[static_cast<std::size_t>(q)];
        s.weights[q] = qp.weight;
        for (int a = 0; a < qp.count; ++a) {
            s.values.row(q) += qp.shape[a] * B.row(qp.dofs[a]);
            s.dx.row(q) += qp.dshape_dx[a] * B.row(qp.dofs[a]);
        }
    }
    return s;
}

Tensor3 assemble_T(const ReducedBasis& basis, const FemOperators& fem)
{
    const ModeSamples s = sample_modes(fem, basis.B);
    const Eigen::Index n = basis.n_modes();
    Tensor3 T(n);
    Matrix weighted(s.values.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        weighted = s.values.array().colwise() * (s.weights.array() * s.values.col(i).array());
        const Matrix slice = weighted.transpose() * s.values;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                T(i, j, k) = slice(j, k);
    }
    T.symmetrize();
    return T;
}

Matrix assemble_D(const ReducedBasis& basis, const FemOperators& fem)
{
    if (fem.dim != 1 || fem.convection.rows() == 0)
        throw std::invalid_argument("assemble_D: derivative projection is only defined for 1D bases");
    return basis.B.transpose() * (fem.convection * basis.B);
}

Matrix assemble_D3(const ReducedBasis& basis, const FemOperators& fem, const Vector& u0, double chi)
{
    if (fem.dim != 1)
        throw std::invalid_argument("assemble_D3: third-derivative projection is only defined for 1D bases");
    if (u0.size() != fem.n_active())
        throw std::invalid_argument("assemble_D3: potential has wrong length");
    if (std::abs(chi - basis.chi) > 1e-12 * std::max(1.0, std::abs(chi)))
        throw std::invalid_argument("assemble_D3: chi differs from the one the basis was built with");
    // The basis must satisfy the eigenrelation for this potential.
    const SparseMatrix op = fem.stiffness - chi * assemble_weighted_mass(fem, u0);
    const Matrix R = op * basis.B - (fem.mass * basis.B) * basis.lambda.asDiagonal();
    const double scale = (op * basis.B).norm() + 1.0;
    if (R.norm() > 1e-6 * scale)
        throw std::invalid_argument("assemble_D3: basis is not an eigenbasis of the given potential");

    const ModeSamples s = sample_modes(fem, basis.B);
    Vector uq = Vector::Zero(s.weights.size());
    for (Eigen::Index q = 0; q < uq.size(); ++q) {
        const auto& qp = fem.cubature[static_cast<std::size_t>(q)];
        for (int a = 0; a < qp.count; ++a)
            uq[q] += qp.shape[a] * u0[qp.dofs[a]];
    }
    Matrix potential_term = s.values * basis.lambda.asDiagonal();
    potential_term += (chi * uq).asDiagonal() * s.values;
    return s.dx.transpose() * (s.weights.asDiagonal() * potential_term);
}

Tensor3 bracket3(const Matrix& M, const Tensor3& T)
{
    const Eigen::Index n = T.dim();
    if (M.rows() != n || M.cols() != n)
        throw std::invalid_argument("bracket3: matrix and tensor dimensions differ");
    Tensor3 out(n);
    MutableUnfolding first(out.data(), n, n * n);
    first.noalias() = M.transpose() * T.unfold_first();
    MutableUnfolding last(out.data(), n * n, n);
    last.noalias() += T.unfold_last() * M;
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Map<const RowMajorMatrix> slice(T.data() + i * n * n, n, n);
        MutableUnfolding out_slice(out.data() + i * n * n, n, n);
        out_slice.noalias() += M.transpose() * slice;
    }
    return out;
}

Matrix commutator(const Matrix& A, const Matrix& B)
{
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw std::invalid_argument("commutator: operands must be square and of equal size");
    return A * B - B * A;
}

}  // namespace alp
