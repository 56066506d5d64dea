#pragma once

#include <vector>

#include "alp/models.hpp"

namespace alp {

class AlpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reduced unknowns evolved by the integrator.
struct ReducedState {
    Vector coeffs;  // beta, or alpha for the soliton law
    Vector lambda;
    Tensor3 T;
    AuxMap aux;
    double t = 0.0;
};

struct AlpConfig {
    double chi = 1.0;
    double dt = 1e-3;
    double t_max = 1.0;
    double fp_tol = 1e-11;
    int fp_max_iters = 100;
    double tol_deg = kDefaultTolDeg;
    /// Couplings |sum_m T_ijm gamma_m| below tol_coupling times the largest one are dropped.
    double tol_coupling = 0.0;
    /// Relaxation of the fixed-point update, 1 = plain Picard iteration.
    double damping = 1.0;
    /// Keep T and the auxiliary matrices of every state (memory grows as N^3 per step).
    bool keep_tensors = false;

    void validate() const;
    int n_steps() const;
};

/// Time-ordered reduced states plus the per-step midpoint operators.
///
/// `m_half[n]` is M^(n+1/2), with M_ij = <d/dt phi_i, phi_j>; the basis propagates as
/// dB/dt = -B M while coefficients, T and auxiliary matrices are driven by M^T.
struct Trajectory {
    std::vector<ReducedState> states;  // tensors only in the first/last state unless keep_tensors
    std::vector<Matrix> m_half;
    std::vector<double> frob;          // ||M^(n+1/2)||_F
    std::vector<double> t_norm;        // ||T^(n)||_F, one per state
    std::vector<int> iterations;       // fixed-point iterations per step
};

/// M_ij = chi / (lambda_j - lambda_i) sum_m T_ijm gamma_m, zero on the diagonal and for
/// (near-)degenerate pairs |lambda_i - lambda_j| <= tol_deg (1 + |lambda_i|) and for pairs
/// whose coupling is at most tol_coupling times the largest off-diagonal coupling.
Matrix build_M(const Vector& lambda, const Tensor3& T, const Vector& gamma, double chi,
               double tol_deg = kDefaultTolDeg, double tol_coupling = 0.0);

/// ||M||_F^2, the sum of squared entries.
double frobenius_indicator(const Matrix& M);
/// e(phi_m) = sum_n M_mn^2
double mode_indicator(const Matrix& M, Eigen::Index m);

/// |frob_run - frob_ref| / frob_ref
double frobenius_error_indicator(double frob_run, double frob_ref);

struct StepResult {
    ReducedState state;
    Matrix m_half;
    int iterations = 0;
    double residual = 0.0;
};

/// One implicit-midpoint step, solved by fixed-point iteration.
StepResult step_midpoint(const ReducedState& state, const EquationModel& model, const AlpConfig& cfg);

/// T(0) and the auxiliary matrices the model needs, assembled from the initial basis.
ReducedState initial_state(const ReducedBasis& basis, const FemOperators& fem, const Vector& u0,
                           const Vector& coeffs0, const EquationModel& model);

Trajectory integrate(ReducedState state, const EquationModel& model, const AlpConfig& cfg);

Trajectory run(const ReducedBasis& basis, const FemOperators& fem, const Vector& u0, const Vector& coeffs0,
               const EquationModel& model, const AlpConfig& cfg);

}  // namespace alp
