#include "alp/eigsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <lapacke.h>

namespace alp {

namespace {

void fix_signs(Matrix& B)
{
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
        auto col = B.col(j);
        const double peak = col.cwiseAbs().maxCoeff();
        // First entry within a relative hair of the peak decides, so symmetric modes
        // with two equal extrema get a reproducible sign.
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            if (std::abs(col[i]) >= peak * (1.0 - 1e-6)) {
                if (col[i] < 0.0)
                    col = -col;
                break;
            }
        }
    }
}

std::vector<bool> flag_degenerate(const Vector& lambda, double tol_deg)
{
    std::vector<bool> deg(static_cast<std::size_t>(std::max<Eigen::Index>(lambda.size() - 1, 0)), false);
    for (Eigen::Index i = 0; i + 1 < lambda.size(); ++i)
        deg[static_cast<std::size_t>(i)] = std::abs(lambda[i + 1] - lambda[i]) <= tol_deg * (1.0 + std::abs(lambda[i]));
    return deg;
}

}  // namespace

ReducedBasis solve_schrodinger_eig(const FemOperators& fem, const Vector& u0, double chi, int n_modes,
                                   double tol_deg)
{
    const Eigen::Index n = fem.n_active();
    if (!(chi > 0.0))
        throw EigenSolveError("solve_schrodinger_eig: chi must be positive");
    if (n_modes < 1 || n_modes > n)
        throw EigenSolveError("solve_schrodinger_eig: n_modes = " + std::to_string(n_modes) +
                              " outside [1, " + std::to_string(n) + "]");

    const SparseMatrix op = fem.stiffness - chi * assemble_weighted_mass(fem, u0);
    Matrix A = Matrix(op);
    Matrix G = Matrix(fem.mass);

    const auto ni = static_cast<lapack_int>(n);
    lapack_int found = 0;
    Vector w(n);
    Matrix Z(n, n_modes);
    std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
    const double abstol = 2.0 * LAPACKE_dlamch('S');
    const lapack_int info =
        LAPACKE_dsygvx(LAPACK_COL_MAJOR, 1, 'V', 'I', 'U', ni, A.data(), ni, G.data(), ni, 0.0, 0.0, 1,
                       static_cast<lapack_int>(n_modes), abstol, &found, w.data(), Z.data(), ni, ifail.data());
    if (info > ni)
        throw EigenSolveError("solve_schrodinger_eig: mass matrix is not positive definite");
    if (info != 0 || found != n_modes)
        throw EigenSolveError("solve_schrodinger_eig: eigensolver did not converge (info " + std::to_string(info) +
                              ")");

    ReducedBasis basis;
    basis.B = std::move(Z);
    basis.lambda = w.head(n_modes);
    basis.chi = chi;
    fix_signs(basis.B);
    basis.degenerate = flag_degenerate(basis.lambda, tol_deg);

    for (Eigen::Index j = 0; j < basis.B.cols(); ++j) {
        const Vector phi = basis.B.col(j);
        const Vector r = op * phi - basis.lambda[j] * (fem.mass * phi);
        basis.max_residual =
            std::max(basis.max_residual, r.norm() / ((std::abs(basis.lambda[j]) + 1.0) * phi.norm()));
    }
    return basis;
}

ReducedBasis truncate(const ReducedBasis& basis, int n_modes)
{
    if (n_modes < 1 || n_modes > basis.n_modes())
        throw EigenSolveError("truncate: cannot keep " + std::to_string(n_modes) + " of " +
                              std::to_string(basis.n_modes()) + " modes");
    ReducedBasis out;
    out.B = basis.B.leftCols(n_modes);
    out.lambda = basis.lambda.head(n_modes);
    out.chi = basis.chi;
    out.degenerate.assign(basis.degenerate.begin(), basis.degenerate.begin() + (n_modes - 1));
    out.max_residual = basis.max_residual;
    return out;
}

Projection initial_projection(const FemOperators& fem, const ReducedBasis& basis, const Vector& u0)
{
    if (u0.size() != basis.B.rows() || u0.size() != fem.n_active())
        throw EigenSolveError("initial_projection: dimension mismatch");
    Projection p;
    const Vector Gu = fem.mass * u0;
    p.beta = basis.B.transpose() * Gu;
    const Vector r = u0 - basis.B * p.beta;
    p.error = g_norm(fem, r);
    const double ref = std::sqrt(std::max(0.0, u0.dot(Gu)));
    p.relative_error = ref > 0.0 ? p.error / ref : 0.0;
    return p;
}

ChiChoice choose_chi(const FemOperators& fem, const Vector& u0, double epsilon0, const std::vector<double>& chi_grid,
                     int n_modes)
{
    if (chi_grid.empty())
        throw EigenSolveError("choose_chi: empty chi grid");
    ChiChoice choice;
    double best = std::numeric_limits<double>::infinity();
    for (double chi : chi_grid) {
        const double err = initial_projection(fem, solve_schrodinger_eig(fem, u0, chi, n_modes), u0).relative_error;
        choice.grid_errors.push_back(err);
        if (!choice.met && err <= epsilon0) {
            choice.chi = chi;
            choice.met = true;
        }
        if (!choice.met && err < best) {
            best = err;
            choice.chi = chi;
        }
    }
    return choice;
}

}  // namespace alp
