#pragma once

#include <map>
#include <string_view>
#include <vector>

#include "alp/reduced_ops.hpp"

namespace alp {

enum class ModelKind { Advection, KdvEigen, Fkpp, KdvSoliton };
enum class CoefficientLaw { Standard, Soliton };

/// How the soliton model projects F(u) onto the moving basis.
enum class SolitonClosure {
    /// gamma_i = 8 sum_j lambda_j alpha_j D_ij
    DerivativeProjection,
    /// gamma_i = 8 sum_j lambda_j alpha_j <phi_j d/dx phi_j, phi_i>, with d/dx phi_j
    /// expanded on the basis: 8 sum_j lambda_j alpha_j sum_l D_lj T_ijl
    SquaredModeDerivative,
};

using AuxMap = std::map<AuxKind, Matrix>;

/// Reduced closure gamma(beta) and coefficient law for one PDE.
struct EquationModel {
    ModelKind kind = ModelKind::Advection;
    double chi = 1.0;
    double c = 0.0;   // advection speed
    double nu = 0.0;  // logistic rate
    /// Advection only: drive the reduced update with the closed-form generator -cD
    /// instead of the matrix built from gamma.
    bool closed_form_generator = false;
    SolitonClosure soliton_closure = SolitonClosure::SquaredModeDerivative;

    static EquationModel advection(double c, double chi);
    static EquationModel kdv_eigen(double chi);
    static EquationModel fkpp(double nu, double chi);
    static EquationModel kdv_soliton(double chi, SolitonClosure closure = SolitonClosure::SquaredModeDerivative);

    std::string_view name() const;
    CoefficientLaw law() const;
    std::vector<AuxKind> required_aux() const;

    /// gamma evaluated on a (midpoint) reduced state.
    Vector gamma(const Vector& coeffs, const Vector& lambda, const Tensor3& T, const AuxMap& aux) const;
};

Vector gamma_advection(const Vector& beta, const Matrix& D, double c);

/// gamma_i = (3/chi) sum_j lambda_j D_ij beta_j - (1 - 3/chi) sum_j D3_ij beta_j
Vector gamma_kdv_eigen(const Vector& beta, const Vector& lambda, const Matrix& D, const Matrix& D3, double chi);

/// gamma_i = (nu - lambda_i) beta_i - (chi + nu) sum_jk T_ijk beta_j beta_k
Vector gamma_fkpp(const Vector& beta, const Vector& lambda, const Tensor3& T, double chi, double nu);

/// Soliton-model closure; alpha has N_- <= N_M entries, the result has N_M.
Vector gamma_kdv_soliton(const Vector& alpha, const Vector& lambda, const Matrix& D, const Tensor3& T,
                         SolitonClosure closure);

/// d alpha_i / dt = -2 sum_j (W_ij - 4 lambda_j D_ij) alpha_j over the N_- soliton modes,
/// where W is the generator acting on the coefficients (W = M^T).
Vector soliton_coefficient_rhs(const Vector& alpha, const Vector& lambda, const Matrix& D, const Matrix& W);

/// alpha_i(0) = 4 sqrt(-lambda_i) / chi for every negative eigenvalue below -tol.
Vector soliton_initial_coefficients(const Vector& lambda, double chi, double tol = kDefaultTolDeg);

}  // namespace alp
