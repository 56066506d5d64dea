#include "alp/reconstruct.hpp"

#include <cmath>

namespace alp {

void gram_schmidt_g(const FemOperators& fem, Matrix& B)
{
    Matrix GB(B.rows(), B.cols());
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
        for (Eigen::Index k = 0; k < j; ++k)
            B.col(j) -= GB.col(k).dot(B.col(j)) * B.col(k);
        GB.col(j) = fem.mass * B.col(j);
        const double nrm = std::sqrt(B.col(j).dot(GB.col(j)));
        if (!(nrm > 0.0))
            throw ReconstructError("gram_schmidt_g: basis column became dependent");
        B.col(j) /= nrm;
        GB.col(j) /= nrm;
    }
}

double orthonormality_defect(const FemOperators& fem, const Matrix& B)
{
    const Matrix gram = B.transpose() * (fem.mass * B);
    return (gram - Matrix::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff();
}

Matrix propagate_basis(const FemOperators& fem, const Matrix& B, const Matrix& M_half, double dt,
                       bool orthonormalize)
{
    const Eigen::Index n = B.cols();
    if (M_half.rows() != n || M_half.cols() != n)
        throw ReconstructError("propagate_basis: M has the wrong size");
    const Matrix I = Matrix::Identity(n, n);
    const Matrix lhs = I + 0.5 * dt * M_half;
    const Matrix rhs = I - 0.5 * dt * M_half;
    Eigen::PartialPivLU<Matrix> lu(lhs.transpose());
    if (!(std::abs(lu.determinant()) > 1e-300))
        throw ReconstructError("propagate_basis: singular Crank-Nicolson system");
    // B+ = B rhs lhs^{-1}  <=>  lhs^T B+^T = (B rhs)^T
    Matrix out = lu.solve((B * rhs).transpose()).transpose();
    if (orthonormalize)
        gram_schmidt_g(fem, out);
    return out;
}

ReducedBasis propagate_basis(const FemOperators& fem, const ReducedBasis& basis, const Matrix& M_half, double dt)
{
    ReducedBasis out = basis;
    out.B = propagate_basis(fem, basis.B, M_half, dt);
    return out;
}

Vector reconstruct_nodal(const Matrix& B, const Vector& coeffs, CoefficientLaw law)
{
    switch (law) {
    case CoefficientLaw::Standard:
        if (coeffs.size() != B.cols())
            throw ReconstructError("reconstruct_nodal: coefficient count differs from basis size");
        return B * coeffs;
    case CoefficientLaw::Soliton: {
        if (coeffs.size() > B.cols())
            throw ReconstructError("reconstruct_nodal: more soliton coefficients than modes");
        const Eigen::Index ns = coeffs.size();
        return B.leftCols(ns).array().square().matrix() * coeffs;
    }
    }
    throw ReconstructError("reconstruct_nodal: unknown coefficient law");
}

void replay_basis(const FemOperators& fem, const Matrix& B0, const Trajectory& traj, double dt,
                  const std::function<void(std::size_t, const Matrix&)>& visit)
{
    Matrix B = B0;
    visit(0, B);
    for (std::size_t n = 0; n < traj.m_half.size(); ++n) {
        B = propagate_basis(fem, B, traj.m_half[n], dt);
        visit(n + 1, B);
    }
}

}  // namespace alp
