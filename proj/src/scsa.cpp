#include "alp/scsa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace alp {

namespace {

double relative_error(const FemOperators& fem, const Vector& u, const Vector& approx)
{
    const double nu = g_norm(fem, u);
    if (nu == 0.0)
        return g_norm(fem, approx) == 0.0 ? 0.0 : 1.0;
    return g_norm(fem, u - approx) / nu;
}

std::vector<SweepRow> sweep_one(const FemOperators& fem, const Vector& u, double chi, int cap, ScsaMethod method)
{
    std::vector<SweepRow> rows;
    if (method == ScsaMethod::Soliton) {
        const Expansion e = soliton_expansion(fem, u, chi);
        rows.push_back({chi, e.n_negative, e.error});
        return rows;
    }
    const ReducedBasis basis = solve_schrodinger_eig(fem, u, chi, cap);
    const Vector beta = basis.B.transpose() * (fem.mass * u);
    const double nu = g_norm(fem, u);
    Vector r = u;
    for (int n = 1; n <= cap; ++n) {
        r -= beta[n - 1] * basis.B.col(n - 1);
        rows.push_back({chi, n, nu == 0.0 ? 0.0 : g_norm(fem, r) / nu});
    }
    return rows;
}

}  // namespace

Expansion eigen_expansion(const FemOperators& fem, const Vector& u, double chi, int n_modes)
{
    if (!(chi > 0.0))
        throw ScsaError("eigen_expansion: chi must be positive");
    if (n_modes < 1 || n_modes > fem.n_active())
        throw ScsaError("eigen_expansion: n_modes exceeds the available spectrum");
    const ReducedBasis basis = solve_schrodinger_eig(fem, u, chi, n_modes);
    Expansion e;
    e.approx = basis.B * (basis.B.transpose() * (fem.mass * u));
    e.error = relative_error(fem, u, e.approx);
    return e;
}

Expansion soliton_expansion(const FemOperators& fem, const Vector& u, double chi, double tol_deg)
{
    if (!(chi > 0.0))
        throw ScsaError("soliton_expansion: chi must be positive");
    if (u.size() != fem.n_active())
        throw ScsaError("soliton_expansion: signal length does not match the mesh");
    if (u.size() > 0 && u.minCoeff() < 0.0)
        throw ScsaError("soliton_expansion: signal has negative values; apply shift_nonnegative first");
    const int n_total = static_cast<int>(fem.n_active());
    int request = std::min(n_total, 32);
    ReducedBasis basis;
    for (;;) {
        basis = solve_schrodinger_eig(fem, u, chi, request);
        if (basis.lambda[request - 1] >= -tol_deg || request == n_total)
            break;
        request = std::min(n_total, 2 * request);
    }
    Expansion e;
    e.approx = Vector::Zero(u.size());
    for (Eigen::Index m = 0; m < basis.n_modes() && basis.lambda[m] < -tol_deg; ++m) {
        e.approx += (4.0 / chi) * std::sqrt(-basis.lambda[m]) * basis.B.col(m).array().square().matrix();
        ++e.n_negative;
    }
    e.error = relative_error(fem, u, e.approx);
    return e;
}

Shifted shift_nonnegative(const Vector& u)
{
    Shifted s;
    s.offset = u.size() ? u.minCoeff() : 0.0;
    s.values = u.array() - s.offset;
    return s;
}

std::vector<SweepRow> chi_sweep(const FemOperators& fem, const Vector& u, const std::vector<double>& chi_grid,
                                int n_modes_cap, ScsaMethod method, int threads)
{
    if (chi_grid.empty())
        throw ScsaError("chi_sweep: empty grid");
    if (method == ScsaMethod::Eigen && (n_modes_cap < 1 || n_modes_cap > fem.n_active()))
        throw ScsaError("chi_sweep: invalid mode cap");
    std::vector<std::vector<SweepRow>> per_chi(chi_grid.size());
    std::vector<std::string> failures(chi_grid.size());
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1,
                                                        chi_grid.size());
    auto work = [&](std::size_t first) {
        for (std::size_t g = first; g < chi_grid.size(); g += workers) {
            try {
                per_chi[g] = sweep_one(fem, u, chi_grid[g], n_modes_cap, method);
            } catch (const std::exception& ex) {
                failures[g] = ex.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool)
        t.join();
    std::vector<SweepRow> rows;
    for (std::size_t g = 0; g < chi_grid.size(); ++g) {
        if (!failures[g].empty())
            throw ScsaError("chi_sweep: chi = " + std::to_string(chi_grid[g]) + ": " + failures[g]);
        rows.insert(rows.end(), per_chi[g].begin(), per_chi[g].end());
    }
    return rows;
}

const SweepRow* best_for_modes(const std::vector<SweepRow>& rows, int n_modes)
{
    const SweepRow* best = nullptr;
    for (const auto& r : rows)
        if (r.n_modes == n_modes && (!best || r.error < best->error))
            best = &r;
    return best;
}

Signal read_signal_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ScsaError("read_signal_csv: cannot open " + path);
    Signal s;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x, v;
        if (!(row >> x >> v)) {
            if (first) {
                first = false;
                continue;
            }
            throw ScsaError("read_signal_csv: malformed line: " + line);
        }
        first = false;
        s.x.push_back(x);
        s.value.push_back(v);
    }
    if (s.x.size() < 2)
        throw ScsaError("read_signal_csv: need at least two samples");
    for (std::size_t i = 1; i < s.x.size(); ++i)
        if (!(s.x[i] > s.x[i - 1]))
            throw ScsaError("read_signal_csv: abscissae must be strictly increasing");
    return s;
}

std::vector<double> resample(const Signal& s, const std::vector<double>& x)
{
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = std::clamp(x[i], s.x.front(), s.x.back());
        auto it = std::upper_bound(s.x.begin(), s.x.end(), xi);
        std::size_t j = static_cast<std::size_t>(it - s.x.begin());
        j = std::clamp<std::size_t>(j, 1, s.x.size() - 1);
        const double w = (xi - s.x[j - 1]) / (s.x[j] - s.x[j - 1]);
        out[i] = (1.0 - w) * s.value[j - 1] + w * s.value[j];
    }
    return out;
}

}  // namespace alp
