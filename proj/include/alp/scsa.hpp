#pragma once

#include <string>
#include <vector>

#include "alp/eigsolve.hpp"

namespace alp {

class ScsaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Expansion {
    Vector approx;
    double error = 0.0;  // relative G-norm error, 0 for a zero signal
    int n_negative = 0;  // bound states used (soliton expansion only)
};

/// Projection of u on the first n_modes eigenfunctions of -Laplace - chi u.
Expansion eigen_expansion(const FemOperators& fem, const Vector& u, double chi, int n_modes);

/// (4 / chi) sum_m sqrt(-lambda_m) phi_m^2 over the bound states of -Laplace - chi u.
/// Requires u >= 0.
Expansion soliton_expansion(const FemOperators& fem, const Vector& u, double chi, double tol_deg = kDefaultTolDeg);

struct Shifted {
    Vector values;
    double offset = 0.0;
};
/// u - min(u)
Shifted shift_nonnegative(const Vector& u);

enum class ScsaMethod { Eigen, Soliton };

struct SweepRow {
    double chi;
    int n_modes;
    double error;
};

/// Eigen method: one row per (chi, n) with n = 1..n_modes_cap.
/// Soliton method: one row per chi with n_modes = number of bound states.
std::vector<SweepRow> chi_sweep(const FemOperators& fem, const Vector& u, const std::vector<double>& chi_grid,
                                int n_modes_cap, ScsaMethod method, int threads = 1);

/// Row with the smallest error among those with the given mode count (nullptr if none).
const SweepRow* best_for_modes(const std::vector<SweepRow>& rows, int n_modes);

struct Signal {
    std::vector<double> x;
    std::vector<double> value;
};
/// Two-column CSV (x, value); a non-numeric first line is treated as a header.
Signal read_signal_csv(const std::string& path);
/// Linear interpolation of the signal at the given sorted abscissae.
std::vector<double> resample(const Signal& s, const std::vector<double>& x);

}  // namespace alp
