#pragma once

#include <functional>
#include <vector>

#include "alp/mesh_fem.hpp"

namespace alp {

class ReferenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// u0(x - c t) on the active nodes.
Vector advection_exact(const FemOperators& fem, const std::function<double(double)>& u0, double c, double t);
/// Same, from nodal data on a 1D mesh (linear interpolation, zero outside the mesh).
Vector advection_exact(const FemOperators& fem, const Vector& u0_active, double c, double t);

/// (beta/2) sech^2(sqrt(beta)/2 (x - beta t - x0))
double kdv_one_soliton(double beta_speed, double x0, double x, double t);

/// Multi-soliton of u_t + 6 u u_x + u_xxx = 0,
/// u = 2 d^2/dx^2 log det(I + A), A_mn = c_m c_n / (k_m + k_n) exp(theta_m + theta_n),
/// theta_m = k_m x - 4 k_m^3 t.
double kdv_n_soliton(const Vector& c, const Vector& k, double x, double t);

/// Parameters of the one-soliton produced by kdv_n_soliton with a single (c, k).
struct OneSolitonParams {
    double beta_speed;
    double x0;
};
OneSolitonParams one_soliton_from_scattering(double c, double k);

/// P1 reference for u_t = Laplace u + nu u (1 - u): Crank-Nicolson diffusion,
/// Adams-Bashforth 2 reaction (explicit Euler first step). Returns n_steps + 1 states.
std::vector<Vector> fkpp_reference(const FemOperators& fem, const Vector& u0, double nu, double dt, int n_steps);

}  // namespace alp
