#pragma once

#include <string_view>
#include <vector>

#include "alp/eigsolve.hpp"
#include "alp/mesh_fem.hpp"

namespace alp {

/// Dense N x N x N tensor, stored with the last index fastest.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(Eigen::Index n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

    Eigen::Index dim() const { return n_; }

    double& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) { return data_[index(i, j, k)]; }
    double operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const { return data_[index(i, j, k)]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

    /// Row-major N x N^2 view, rows indexed by the first index.
    using Unfolding = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    Unfolding unfold_first() const { return Unfolding(data(), n_, n_ * n_); }
    Unfolding unfold_last() const { return Unfolding(data(), n_ * n_, n_); }

    double frobenius_norm() const;
    double dot(const Tensor3& other) const;
    /// max |T_ijk - T_sigma(ijk)| over all index permutations.
    double symmetry_defect() const;
    /// Replaces every entry by the mean over its six index permutations.
    void symmetrize();

    /// this += s * other
    Tensor3& axpy(double s, const Tensor3& other);
    Tensor3& operator*=(double s);

private:
    std::size_t index(Eigen::Index i, Eigen::Index j, Eigen::Index k) const
    {
        return static_cast<std::size_t>((i * n_ + j) * n_ + k);
    }

    Eigen::Index n_ = 0;
    std::vector<double> data_;
};

enum class AuxKind { D, D3 };

std::string_view to_string(AuxKind kind);

/// Values (and x-derivatives) of every basis mode at every cubature point.
struct ModeSamples {
    Vector weights;  // Q
    Matrix values;   // Q x N
    Matrix dx;       // Q x N
};

ModeSamples sample_modes(const FemOperators& fem, const Matrix& B);

/// T_ijk = <phi_k phi_j, phi_i>, exact for P1 modes.
Tensor3 assemble_T(const ReducedBasis& basis, const FemOperators& fem);

/// D_ij = <d/dx phi_j, phi_i> = (B^T C B)_ij. 1D only.
Matrix assemble_D(const ReducedBasis& basis, const FemOperators& fem);

/// D3_ij = <d3/dx3 phi_j, phi_i>, evaluated through the eigenrelation
/// -phi_j'' = (lambda_j + chi u0) phi_j as <(lambda_j + chi u0) phi_j, phi_i'>.
/// The basis must have been built from (u0, chi).
Matrix assemble_D3(const ReducedBasis& basis, const FemOperators& fem, const Vector& u0, double chi);

/// {M,T}_ijk = sum_l (M_li T_ljk + M_lj T_ilk + M_lk T_ijl).
Tensor3 bracket3(const Matrix& M, const Tensor3& T);

/// [A, B] = AB - BA.
Matrix commutator(const Matrix& A, const Matrix& B);

}  // namespace alp
