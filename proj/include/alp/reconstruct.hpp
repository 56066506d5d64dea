#pragma once

#include <functional>

#include "alp/alp_core.hpp"

namespace alp {

class ReconstructError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One Crank-Nicolson step of dB/dt = -B M, B+ (I + dt/2 M) = B (I - dt/2 M),
/// followed by modified Gram-Schmidt in the G inner product.
Matrix propagate_basis(const FemOperators& fem, const Matrix& B, const Matrix& M_half, double dt,
                       bool orthonormalize = true);

ReducedBasis propagate_basis(const FemOperators& fem, const ReducedBasis& basis, const Matrix& M_half, double dt);

/// In-place modified Gram-Schmidt with respect to G.
void gram_schmidt_g(const FemOperators& fem, Matrix& B);

/// max |B^T G B - I|
double orthonormality_defect(const FemOperators& fem, const Matrix& B);

/// Standard law: B beta. Soliton law: sum_i alpha_i B(:,i)^2 over the first alpha.size() columns.
Vector reconstruct_nodal(const Matrix& B, const Vector& coeffs, CoefficientLaw law);

/// Replays the stored M sequence from B0, calling visit(step, B) for step = 0..n_steps.
void replay_basis(const FemOperators& fem, const Matrix& B0, const Trajectory& traj, double dt,
                  const std::function<void(std::size_t, const Matrix&)>& visit);

}  // namespace alp
