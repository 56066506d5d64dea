#pragma once

#include <vector>

#include "alp/mesh_fem.hpp"

namespace alp {

class EigenSolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eigenbasis of the discrete Schrodinger operator -Laplace - chi*u0.
///
/// Column j of `B` holds the nodal coefficients of phi_j on the active nodes.
/// Columns are G-orthonormal and the entry of largest magnitude in each column is
/// positive (ties resolved towards the lowest node index).
struct ReducedBasis {
    Matrix B;
    Vector lambda;
    double chi = 0.0;
    /// degenerate[i] is true when lambda[i] and lambda[i+1] are closer than tol_deg.
    std::vector<bool> degenerate;
    /// max over pairs of ||(K - chi W)phi - lambda G phi|| / ((|lambda| + 1) ||phi||)
    double max_residual = 0.0;

    Eigen::Index n_modes() const { return B.cols(); }
};

inline constexpr double kDefaultTolDeg = 1e-8;

/// Smallest `n_modes` eigenpairs of (K - chi W(u0)) phi = lambda G phi.
ReducedBasis solve_schrodinger_eig(const FemOperators& fem, const Vector& u0, double chi, int n_modes,
                                   double tol_deg = kDefaultTolDeg);

/// Keeps the first `n_modes` columns of an existing basis.
ReducedBasis truncate(const ReducedBasis& basis, int n_modes);

struct Projection {
    Vector beta;
    double error = 0.0;           // ||u0 - B beta||_G
    double relative_error = 0.0;  // error / ||u0||_G (0 when u0 = 0)
};

/// G-orthogonal projection of u0 onto the span of the basis.
Projection initial_projection(const FemOperators& fem, const ReducedBasis& basis, const Vector& u0);

struct ChiChoice {
    double chi = 0.0;
    bool met = false;
    std::vector<double> grid_errors;  // relative projection error at each grid value
};

/// Smallest chi on the grid whose n_modes-term projection of u0 is within epsilon0
/// (relative G-norm). Falls back to the best grid value with met = false.
ChiChoice choose_chi(const FemOperators& fem, const Vector& u0, double epsilon0, const std::vector<double>& chi_grid,
                     int n_modes);

}  // namespace alp
