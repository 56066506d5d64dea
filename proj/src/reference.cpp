#include "alp/reference.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

namespace alp {

Vector advection_exact(const FemOperators& fem, const std::function<double(double)>& u0, double c, double t)
{
    if (fem.dim != 1)
        throw ReferenceError("advection_exact: 1D only");
    return sample_active(fem, [&](double x) { return u0(x - c * t); });
}

Vector advection_exact(const FemOperators& fem, const Vector& u0_active, double c, double t)
{
    if (fem.dim != 1 || u0_active.size() != fem.n_active())
        throw ReferenceError("advection_exact: nodal data does not match the 1D mesh");
    std::vector<double> xs(fem.coords.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = fem.coords[i][0];
    auto interp = [&](double x) {
        if (x < xs.front() || x > xs.back())
            return 0.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        if (it == xs.end())
            return u0_active[u0_active.size() - 1];
        const auto j = static_cast<Eigen::Index>(it - xs.begin());
        if (j == 0)
            return u0_active[0];
        const double s = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return (1.0 - s) * u0_active[j - 1] + s * u0_active[j];
    };
    return sample_active(fem, [&](double x) { return interp(x - c * t); });
}

double kdv_one_soliton(double beta_speed, double x0, double x, double t)
{
    if (!(beta_speed > 0.0))
        throw ReferenceError("kdv_one_soliton: speed must be positive");
    const double s = 1.0 / std::cosh(0.5 * std::sqrt(beta_speed) * (x - beta_speed * t - x0));
    return 0.5 * beta_speed * s * s;
}

OneSolitonParams one_soliton_from_scattering(double c, double k)
{
    return {4.0 * k * k, -std::log(c * c / (2.0 * k)) / (2.0 * k)};
}

double kdv_n_soliton(const Vector& c, const Vector& k, double x, double t)
{
    const Eigen::Index n = k.size();
    if (c.size() != n || n == 0)
        throw ReferenceError("kdv_n_soliton: c and k must be nonempty and of equal length");
    for (Eigen::Index m = 0; m < n; ++m) {
        if (!(k[m] > 0.0) || !(c[m] > 0.0))
            throw ReferenceError("kdv_n_soliton: c and k must be positive");
        for (Eigen::Index l = 0; l < m; ++l)
            if (k[l] == k[m])
                throw ReferenceError("kdv_n_soliton: k must be distinct");
    }
    // det(I + A) = det(S)^2 det(P) with S = diag(max(1, e^theta)); log det S is piecewise
    // linear in x so only P contributes to the second derivative.
    Vector a(n), da(n), dda(n), r(n), kappa(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        const double theta = k[m] * x - 4.0 * k[m] * k[m] * k[m] * t;
        if (theta > 0.0) {
            a[m] = std::exp(-2.0 * theta);
            da[m] = -2.0 * k[m] * a[m];
            dda[m] = 4.0 * k[m] * k[m] * a[m];
            r[m] = 1.0;
            kappa[m] = 0.0;
        } else {
            a[m] = 1.0;
            da[m] = 0.0;
            dda[m] = 0.0;
            r[m] = std::exp(theta);
            kappa[m] = k[m];
        }
    }
    Matrix P(n, n), dP(n, n), ddP(n, n);
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index l = 0; l < n; ++l) {
            const double v = c[m] * c[l] / (k[m] + k[l]) * r[m] * r[l];
            const double s = kappa[m] + kappa[l];
            P(m, l) = v;
            dP(m, l) = s * v;
            ddP(m, l) = s * s * v;
        }
    P.diagonal() += a;
    dP.diagonal() += da;
    ddP.diagonal() += dda;
    Eigen::PartialPivLU<Matrix> lu(P);
    const Matrix X1 = lu.solve(dP);
    const Matrix X2 = lu.solve(ddP);
    return 2.0 * (X2.trace() - (X1 * X1).trace());
}

std::vector<Vector> fkpp_reference(const FemOperators& fem, const Vector& u0, double nu, double dt, int n_steps)
{
    if (u0.size() != fem.n_active())
        throw ReferenceError("fkpp_reference: initial state has wrong length");
    if (!(dt > 0.0) || n_steps < 0)
        throw ReferenceError("fkpp_reference: need dt > 0 and n_steps >= 0");
    const SparseMatrix lhs = fem.mass + 0.5 * dt * fem.stiffness;
    const SparseMatrix rhs = fem.mass - 0.5 * dt * fem.stiffness;
    Eigen::SimplicialLDLT<SparseMatrix> solver(lhs);
    if (solver.info() != Eigen::Success)
        throw ReferenceError("fkpp_reference: factorization failed");
    auto reaction = [&](const Vector& u) -> Vector {
        return fem.mass * (nu * u.array() * (1.0 - u.array())).matrix();
    };
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(n_steps) + 1);
    out.push_back(u0);
    Vector r_prev;
    for (int s = 0; s < n_steps; ++s) {
        const Vector& u = out.back();
        const Vector r = reaction(u);
        Vector load = rhs * u;
        if (s == 0)
            load += dt * r;
        else
            load += dt * (1.5 * r - 0.5 * r_prev);
        Vector next = solver.solve(load);
        if (!next.allFinite())
            throw ReferenceError("fkpp_reference: non-finite state at step " + std::to_string(s + 1));
        r_prev = r;
        out.push_back(std::move(next));
    }
    return out;
}

}  // namespace alp
