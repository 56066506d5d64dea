#include "alp/harness.hpp"

#include <boost/crc.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace alp {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& v)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out << ",";
        if constexpr (std::is_floating_point_v<T>)
            out << num(v[i]);
        else
            out << v[i];
    }
    return out.str();
}

template <class T>
std::vector<T> split(const std::string& text)
{
    std::vector<T> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty())
            continue;
        std::istringstream conv(item);
        T v;
        if (!(conv >> v) || !(conv >> std::ws).eof())
            throw ConfigError("cannot parse list item '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<int> int_range(int first, int last, int step)
{
    std::vector<int> v;
    for (int n = first; n <= last; n += step)
        v.push_back(n);
    return v;
}

const char* closure_name(SolitonClosure c)
{
    return c == SolitonClosure::DerivativeProjection ? "derivative_projection" : "squared_mode_derivative";
}

const char* bc_name(BoundaryCondition bc)
{
    return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

double double_gaussian_signal(double x)
{
    return std::exp(-250.0 * (x - 0.25) * (x - 0.25)) - std::exp(-250.0 * (x - 0.75) * (x - 0.75));
}

EquationModel make_model(const ExperimentConfig& cfg)
{
    switch (cfg.problem) {
    case Problem::Advection: {
        EquationModel m = EquationModel::advection(cfg.c, cfg.chi);
        m.closed_form_generator = cfg.closed_form_generator;
        return m;
    }
    case Problem::Kdv1Eigen:
    case Problem::Kdv3Eigen:
        return EquationModel::kdv_eigen(cfg.chi);
    case Problem::Kdv1Soliton:
    case Problem::Kdv3Soliton:
        return EquationModel::kdv_soliton(cfg.chi, cfg.closure);
    case Problem::Fkpp1d:
    case Problem::Fkpp2dSquare:
        return EquationModel::fkpp(cfg.nu, cfg.chi);
    case Problem::ScsaStatic:
        break;
    }
    throw ConfigError("problem " + to_string(cfg.problem) + " has no time-dependent model");
}

/// Reference solution at every step of the run.
std::vector<Vector> reference_states(const ExperimentConfig& cfg, const ProblemSetup& setup)
{
    const int steps = std::max(1, static_cast<int>(std::lround(cfg.t_max / cfg.dt)));
    const FemOperators& fem = setup.fem;
    std::vector<Vector> out;
    switch (cfg.problem) {
    case Problem::Fkpp1d:
    case Problem::Fkpp2dSquare:
        return fkpp_reference(fem, setup.u0, cfg.nu, cfg.dt, steps);
    case Problem::Advection:
        for (int n = 0; n <= steps; ++n)
            out.push_back(advection_exact(fem, [](double x) { return std::exp(-250.0 * (x - 0.25) * (x - 0.25)); },
                                          cfg.c, n * cfg.dt));
        return out;
    case Problem::Kdv1Eigen:
    case Problem::Kdv1Soliton:
        for (int n = 0; n <= steps; ++n) {
            const double t = n * cfg.dt;
            out.push_back(sample_active(fem, [&](double x) { return kdv_one_soliton(cfg.beta_speed, cfg.x0, x, t); }));
        }
        return out;
    case Problem::Kdv3Eigen:
    case Problem::Kdv3Soliton: {
        const Vector c = Eigen::Map<const Vector>(cfg.sol_c.data(), static_cast<Eigen::Index>(cfg.sol_c.size()));
        const Vector k = Eigen::Map<const Vector>(cfg.sol_k.data(), static_cast<Eigen::Index>(cfg.sol_k.size()));
        for (int n = 0; n <= steps; ++n) {
            const double t = n * cfg.dt;
            out.push_back(sample_active(fem, [&](double x) { return kdv_n_soliton(c, k, x, t); }));
        }
        return out;
    }
    case Problem::ScsaStatic:
        break;
    }
    throw ConfigError("problem " + to_string(cfg.problem) + " has no reference solution");
}

struct AlpRun {
    ReducedBasis basis;
    Vector coeffs0;
    Projection projection;
    Trajectory traj;
};

AlpRun run_alp(const ExperimentConfig& cfg, const ProblemSetup& setup, const ReducedBasis& full, int nm)
{
    AlpRun r;
    r.basis = truncate(full, nm);
    const EquationModel model = make_model(cfg);
    r.projection = initial_projection(setup.fem, r.basis, setup.u0);
    if (cfg.soliton()) {
        r.coeffs0 = soliton_initial_coefficients(r.basis.lambda, cfg.chi, cfg.tol_deg);
        if (r.coeffs0.size() == 0)
            throw AlpError("no negative eigenvalue: the soliton model has no coefficients");
    } else {
        r.coeffs0 = r.projection.beta;
    }
    AlpConfig acfg;
    acfg.chi = cfg.chi;
    acfg.dt = cfg.dt;
    acfg.t_max = cfg.t_max;
    acfg.fp_tol = cfg.fp_tol;
    acfg.fp_max_iters = cfg.fp_max_iters;
    acfg.tol_deg = cfg.tol_deg;
    acfg.tol_coupling = cfg.tol_coupling;
    acfg.damping = cfg.damping;
    r.traj = run(r.basis, setup.fem, setup.u0, r.coeffs0, model, acfg);
    return r;
}

std::vector<int> snapshot_steps(const ExperimentConfig& cfg)
{
    const int steps = std::max(1, static_cast<int>(std::lround(cfg.t_max / cfg.dt)));
    std::vector<int> out;
    for (double q : {0.0, 0.25, 0.5, 1.0}) {
        const int n = std::clamp(static_cast<int>(std::lround(q * steps)), 0, steps);
        if (out.empty() || out.back() != n)
            out.push_back(n);
    }
    return out;
}

NmRow evaluate_nm(const ExperimentConfig& cfg, const ProblemSetup& setup, const ReducedBasis& full,
                  const std::vector<Vector>& ref, const std::vector<double>* frob_ref, int nm)
{
    NmRow row;
    row.nm = nm;
    const auto start = std::chrono::steady_clock::now();
    try {
        const AlpRun r = run_alp(cfg, setup, full, nm);
        const Trajectory& traj = r.traj;
        const CoefficientLaw law = cfg.soliton() ? CoefficientLaw::Soliton : CoefficientLaw::Standard;
        const std::vector<int> snaps = snapshot_steps(cfg);
        row.snapshot_steps = snaps;
        replay_basis(setup.fem, r.basis.B, traj, cfg.dt, [&](std::size_t n, const Matrix& B) {
            const Vector u = reconstruct_nodal(B, traj.states[n].coeffs, law);
            row.t.push_back(traj.states[n].t);
            row.eps_l2.push_back(eps_l2(setup.fem, ref[n], u));
            row.eps_a.push_back(eps_amplitude(ref[n], u));
            if (std::find(snaps.begin(), snaps.end(), static_cast<int>(n)) != snaps.end()) {
                row.snapshot_ref.push_back(ref[n]);
                row.snapshot_alp.push_back(u);
            }
        });
        row.mean_l2 = time_mean(row.eps_l2, cfg.mean_kind());
        row.max_l2 = *std::max_element(row.eps_l2.begin(), row.eps_l2.end());
        row.l2_tmax = row.eps_l2.back();
        row.eps_a_max = *std::max_element(row.eps_a.begin(), row.eps_a.end());
        row.projection_error = cfg.soliton() ? row.eps_l2.front() : r.projection.relative_error;
        row.max_iterations = traj.iterations.empty() ? 0
                                                     : *std::max_element(traj.iterations.begin(), traj.iterations.end());
        row.frob = traj.frob;
        const Vector& lambda0 = traj.states.front().lambda;
        for (const auto& s : traj.states)
            row.lambda_drift = std::max(row.lambda_drift, ((s.lambda - lambda0).array().abs() /
                                                           (1.0 + lambda0.array().abs())).maxCoeff());
        if (cfg.soliton()) {
            row.has_alpha = true;
            row.n_negative = static_cast<int>(r.coeffs0.size());
            for (const auto& s : traj.states)
                row.alpha_drift = std::max(row.alpha_drift, (s.coeffs - r.coeffs0).cwiseAbs().maxCoeff());
        }
        if (frob_ref) {
            row.has_eps_m = true;
            for (std::size_t n = 0; n < row.frob.size(); ++n)
                if ((*frob_ref)[n] > 0.0)
                    row.eps_m.push_back(frobenius_error_indicator(row.frob[n], (*frob_ref)[n]));
            if (row.eps_m.empty()) {
                row.has_eps_m = false;
            } else {
                double s = 0.0;
                for (double e : row.eps_m)
                    s += e;
                row.mean_eps_m = s / static_cast<double>(row.eps_m.size());
                row.max_eps_m = *std::max_element(row.eps_m.begin(), row.eps_m.end());
            }
        }
        row.ok = true;
    } catch (const std::exception& ex) {
        row.ok = false;
        row.error = ex.what();
    }
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cfg.verbose) {
        std::cerr << to_string(cfg.problem) << " N_M=" << nm << ": "
                  << (row.ok ? "mean eps_L2 " + num(row.mean_l2) : "error: " + row.error) << " (" << row.runtime_s
                  << " s)\n";
    }
    return row;
}

/// Runs f(i) for i in [0, n) on up to `threads` workers; results are stored by index.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f)
{
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1,
                                                        std::max<std::size_t>(n, 1));
    auto work = [&](std::size_t first) {
        for (std::size_t i = first; i < n; i += workers)
            f(i);
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool)
        t.join();
}

int max_modes(const ExperimentConfig& cfg, bool with_ref)
{
    int n = *std::max_element(cfg.nm_list.begin(), cfg.nm_list.end());
    return with_ref ? std::max(n, cfg.nm_ref) : n;
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream out(p);
    if (!out)
        throw ConfigError("cannot write " + p.string());
    return out;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& kind, const std::vector<std::string>& status)
{
    const fs::path dir(cfg.output_dir);
    open_out(dir / "config.ini") << to_ini(cfg);
    auto out = open_out(dir / "manifest.txt");
    out << "command = " << kind << "\n";
    out << "problem = " << to_string(cfg.problem) << "\n";
    out << "config_crc32 = " << config_hash(cfg) << "\n";
    out << "alp_version = " << kVersion << "\n";
    out << "eigen_version = " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION
        << "\n";
    out << "compiler = " << __VERSION__ << "\n";
    out << "cxx_standard = " << __cplusplus << "\n";
    for (const auto& s : status)
        out << s << "\n";
}

void write_snapshot(const fs::path& p, const FemOperators& fem, const Vector& ref, const Vector& alp,
                    const char* ref_name = "u_ref", const char* alp_name = "u_alp")
{
    auto out = open_out(p);
    out << (fem.dim == 1 ? "x" : "x,y") << "," << ref_name << "," << alp_name << "\n";
    for (Eigen::Index i = 0; i < ref.size(); ++i) {
        const auto& c = fem.coords[static_cast<std::size_t>(i)];
        out << num(c[0]) << ",";
        if (fem.dim == 2)
            out << num(c[1]) << ",";
        out << num(ref[i]) << "," << num(alp[i]) << "\n";
    }
}

}  // namespace

std::string to_string(Problem p)
{
    switch (p) {
    case Problem::Advection:
        return "advection";
    case Problem::Kdv1Eigen:
        return "kdv1_eigen";
    case Problem::Kdv3Eigen:
        return "kdv3_eigen";
    case Problem::Kdv1Soliton:
        return "kdv1_soliton";
    case Problem::Kdv3Soliton:
        return "kdv3_soliton";
    case Problem::Fkpp1d:
        return "fkpp1d";
    case Problem::Fkpp2dSquare:
        return "fkpp2d_square";
    case Problem::ScsaStatic:
        return "scsa_static";
    }
    return "?";
}

Problem problem_from_string(const std::string& s)
{
    for (Problem p : {Problem::Advection, Problem::Kdv1Eigen, Problem::Kdv3Eigen, Problem::Kdv1Soliton,
                      Problem::Kdv3Soliton, Problem::Fkpp1d, Problem::Fkpp2dSquare, Problem::ScsaStatic})
        if (to_string(p) == s)
            return p;
    throw ConfigError("unknown problem '" + s + "'");
}

MeanKind ExperimentConfig::mean_kind() const
{
    return (problem == Problem::Fkpp1d || problem == Problem::Fkpp2dSquare) ? MeanKind::Rms : MeanKind::Linear;
}

bool ExperimentConfig::soliton() const
{
    return problem == Problem::Kdv1Soliton || problem == Problem::Kdv3Soliton;
}

void ExperimentConfig::validate() const
{
    if (problem == Problem::Fkpp2dSquare) {
        if (n_per_side < 2)
            throw ConfigError("n_per_side must be at least 2");
    } else if (!(a < b) || intervals < 2) {
        throw ConfigError("need a < b and at least 2 intervals");
    }
    if (!(chi > 0.0))
        throw ConfigError("chi must be positive");
    if (problem == Problem::ScsaStatic) {
        if (chi_grid.empty())
            throw ConfigError("scsa: chi_grid must be nonempty");
        if (n_modes_cap < 1)
            throw ConfigError("scsa: n_modes_cap must be positive");
        return;
    }
    if (nm_list.empty())
        throw ConfigError("nm_list must be nonempty");
    for (std::size_t i = 0; i < nm_list.size(); ++i) {
        if (nm_list[i] < 1)
            throw ConfigError("nm_list entries must be positive");
        if (i && nm_list[i] <= nm_list[i - 1])
            throw ConfigError("nm_list must be strictly ascending");
    }
    if (!(dt > 0.0) || !(t_max >= dt))
        throw ConfigError("need 0 < dt <= t_max");
    if ((problem == Problem::Kdv3Eigen || problem == Problem::Kdv3Soliton) &&
        (sol_c.empty() || sol_c.size() != sol_k.size()))
        throw ConfigError("sol_c and sol_k must be nonempty and of equal length");
    if ((problem == Problem::Fkpp1d || problem == Problem::Fkpp2dSquare) && !(nu > 0.0))
        throw ConfigError("nu must be positive");
    if (frobenius && nm_ref < 1)
        throw ConfigError("nm_ref must be positive");
    if (!(tol_coupling >= 0.0 && tol_coupling < 1.0))
        throw ConfigError("tol_coupling must lie in [0, 1)");
}

ExperimentConfig preset(Problem p)
{
    ExperimentConfig c;
    c.problem = p;
    switch (p) {
    case Problem::Advection:
        c.frobenius = true;
        break;
    case Problem::Kdv1Eigen:
    case Problem::Kdv1Soliton:
        c.a = -5.0;
        c.b = 23.0;
        c.intervals = 500;
        c.chi = 1.0;
        c.nm_list = int_range(26, 36, 2);
        c.dt = 0.002;
        c.t_max = 5.0;
        break;
    case Problem::Kdv3Eigen:
    case Problem::Kdv3Soliton:
        c.a = -15.0;
        c.b = 15.0;
        c.intervals = 1500;
        c.chi = 1.0;
        c.nm_list = int_range(28, 48, 4);
        c.dt = 2e-4;
        c.t_max = 0.5;
        c.sol_c = {5.0e-2, 1.5e-1, 1.0e1};
        c.sol_k = {1.0, 1.5, 1.75};
        break;
    case Problem::Fkpp1d:
        c.intervals = 250;
        c.chi = 100.0;
        c.damping = 0.7;
        c.nu = 1e3;
        c.nm_list = int_range(6, 16, 2);
        c.dt = 7.5e-5;
        c.t_max = 7.5e-3;
        c.frobenius = true;
        break;
    case Problem::Fkpp2dSquare:
        c.bc = BoundaryCondition::Neumann;
        c.n_per_side = 55;
        c.tol_coupling = 1e-8;
        c.chi = 25.0;
        c.nu = 50.0;
        c.nm_list = int_range(5, 30, 5);
        c.dt = 5e-4;
        c.t_max = 0.05;
        break;
    case Problem::ScsaStatic:
        c.chi = 250.0;
        c.n_modes_cap = 50;
        for (int i = 0; i < 99; ++i)
            c.chi_grid.push_back(100.0 + 50.0 * i);
        break;
    }
    c.output_dir = "out/" + to_string(p);
    return c;
}

ExperimentConfig parse_config(const std::string& text)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    const auto problem = tree.get_optional<std::string>("experiment.problem");
    if (!problem)
        throw ConfigError("config: missing [experiment] problem");
    ExperimentConfig c = preset(problem_from_string(*problem));

    auto get = [&](const char* key, auto& field) {
        using T = std::decay_t<decltype(field)>;
        const auto node = tree.get_child_optional(key);
        if (!node)
            return;
        const auto v = node->get_value_optional<T>();
        if (!v)
            throw ConfigError(std::string("config: bad value for ") + key);
        field = *v;
    };
    auto get_list = [&](const char* key, auto& field) {
        using T = typename std::decay_t<decltype(field)>::value_type;
        if (auto v = tree.get_optional<std::string>(key))
            field = split<T>(*v);
    };

    get("experiment.output_dir", c.output_dir);
    get("experiment.threads", c.threads);
    get("experiment.verbose", c.verbose);
    get("mesh.a", c.a);
    get("mesh.b", c.b);
    get("mesh.intervals", c.intervals);
    get("mesh.n_per_side", c.n_per_side);
    if (auto bc = tree.get_optional<std::string>("mesh.bc")) {
        if (*bc == "dirichlet")
            c.bc = BoundaryCondition::Dirichlet;
        else if (*bc == "neumann")
            c.bc = BoundaryCondition::Neumann;
        else
            throw ConfigError("config: bc must be dirichlet or neumann");
    }
    get("model.chi", c.chi);
    get("model.c", c.c);
    get("model.nu", c.nu);
    get("model.beta", c.beta_speed);
    get("model.x0", c.x0);
    get_list("model.sol_c", c.sol_c);
    get_list("model.sol_k", c.sol_k);
    get("model.closed_form_generator", c.closed_form_generator);
    if (auto cl = tree.get_optional<std::string>("model.closure")) {
        if (*cl == closure_name(SolitonClosure::DerivativeProjection))
            c.closure = SolitonClosure::DerivativeProjection;
        else if (*cl == closure_name(SolitonClosure::SquaredModeDerivative))
            c.closure = SolitonClosure::SquaredModeDerivative;
        else
            throw ConfigError("config: unknown closure '" + *cl + "'");
    }
    get("time.dt", c.dt);
    get("time.t_max", c.t_max);
    get_list("alp.nm_list", c.nm_list);
    get("alp.fp_tol", c.fp_tol);
    get("alp.fp_max_iters", c.fp_max_iters);
    get("alp.damping", c.damping);
    get("alp.tol_deg", c.tol_deg);
    get("alp.tol_coupling", c.tol_coupling);
    get("alp.frobenius", c.frobenius);
    get("alp.nm_ref", c.nm_ref);
    get_list("scsa.chi_grid", c.chi_grid);
    get("scsa.n_modes_cap", c.n_modes_cap);
    get("scsa.signal_csv", c.signal_csv);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string to_ini(const ExperimentConfig& c)
{
    std::ostringstream out;
    out << "[experiment]\nproblem = " << to_string(c.problem) << "\noutput_dir = " << c.output_dir << "\n\n";
    out << "[mesh]\na = " << num(c.a) << "\nb = " << num(c.b) << "\nintervals = " << c.intervals
        << "\nn_per_side = " << c.n_per_side << "\nbc = " << bc_name(c.bc) << "\n\n";
    out << "[model]\nchi = " << num(c.chi) << "\nc = " << num(c.c) << "\nnu = " << num(c.nu)
        << "\nbeta = " << num(c.beta_speed) << "\nx0 = " << num(c.x0) << "\nsol_c = " << join(c.sol_c)
        << "\nsol_k = " << join(c.sol_k) << "\nclosure = " << closure_name(c.closure)
        << "\nclosed_form_generator = " << (c.closed_form_generator ? "true" : "false") << "\n\n";
    out << "[time]\ndt = " << num(c.dt) << "\nt_max = " << num(c.t_max) << "\n\n";
    out << "[alp]\nnm_list = " << join(c.nm_list) << "\nfp_tol = " << num(c.fp_tol)
        << "\nfp_max_iters = " << c.fp_max_iters << "\ndamping = " << num(c.damping) << "\ntol_deg = " << num(c.tol_deg)
        << "\ntol_coupling = " << num(c.tol_coupling)
        << "\nfrobenius = " << (c.frobenius ? "true" : "false") << "\nnm_ref = " << c.nm_ref << "\n\n";
    out << "[scsa]\nchi_grid = " << join(c.chi_grid) << "\nn_modes_cap = " << c.n_modes_cap
        << "\nsignal_csv = " << c.signal_csv << "\n";
    return out.str();
}

std::string config_hash(const ExperimentConfig& cfg)
{
    const std::string text = to_ini(cfg);
    boost::crc_32_type crc;
    crc.process_bytes(text.data(), text.size());
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
    return buf;
}

double eps_l2(const FemOperators& fem, const Vector& u_ref, const Vector& u_alp)
{
    const double ref = g_norm(fem, u_ref);
    if (!(ref > 0.0))
        throw std::invalid_argument("eps_l2: reference has zero norm");
    return g_norm(fem, u_ref - u_alp) / ref;
}

double eps_amplitude(const Vector& u_ref, const Vector& u_alp)
{
    return std::abs(u_ref.maxCoeff() - u_alp.maxCoeff());
}

double time_mean(const std::vector<double>& values, MeanKind kind)
{
    if (values.empty())
        return 0.0;
    if (values.size() == 1)
        return values.front();
    auto f = [&](double v) { return kind == MeanKind::Rms ? v * v : v; };
    double s = 0.5 * (f(values.front()) + f(values.back()));
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
        s += f(values[i]);
    s /= static_cast<double>(values.size() - 1);
    return kind == MeanKind::Rms ? std::sqrt(s) : s;
}

bool MetricsReport::all_ok() const
{
    return frobenius_error.empty() &&
           std::all_of(rows.begin(), rows.end(), [](const NmRow& r) { return r.ok; });
}

const NmRow* MetricsReport::find(int nm) const
{
    for (const auto& r : rows)
        if (r.nm == nm)
            return &r;
    return nullptr;
}

ProblemSetup build_problem(const ExperimentConfig& cfg)
{
    ProblemSetup s;
    if (cfg.problem == Problem::Fkpp2dSquare) {
        const BoundaryFlag flag = cfg.bc == BoundaryCondition::Dirichlet ? BoundaryFlag::Dirichlet
                                                                         : BoundaryFlag::Neumann;
        s.fem = assemble(build_structured_square_mesh(cfg.n_per_side, flag), cfg.bc);
        s.u0 = sample_active(s.fem, [](double x, double y) {
            return std::exp(-50.0 * ((x - 0.5) * (x - 0.5) + (y - 0.25) * (y - 0.25)));
        });
        return s;
    }
    double a = cfg.a, b = cfg.b;
    Signal signal;
    const bool from_csv = cfg.problem == Problem::ScsaStatic && !cfg.signal_csv.empty();
    if (from_csv) {
        signal = read_signal_csv(cfg.signal_csv);
        a = signal.x.front();
        b = signal.x.back();
    }
    s.fem = assemble(build_uniform_mesh_1d(a, b, cfg.intervals + 1), cfg.bc);
    switch (cfg.problem) {
    case Problem::Advection:
        s.u0 = sample_active(s.fem, [](double x) { return std::exp(-250.0 * (x - 0.25) * (x - 0.25)); });
        break;
    case Problem::Kdv1Eigen:
    case Problem::Kdv1Soliton:
        s.u0 = sample_active(s.fem, [&](double x) { return kdv_one_soliton(cfg.beta_speed, cfg.x0, x, 0.0); });
        break;
    case Problem::Kdv3Eigen:
    case Problem::Kdv3Soliton: {
        const Vector c = Eigen::Map<const Vector>(cfg.sol_c.data(), static_cast<Eigen::Index>(cfg.sol_c.size()));
        const Vector k = Eigen::Map<const Vector>(cfg.sol_k.data(), static_cast<Eigen::Index>(cfg.sol_k.size()));
        s.u0 = sample_active(s.fem, [&](double x) { return kdv_n_soliton(c, k, x, 0.0); });
        break;
    }
    case Problem::Fkpp1d:
        s.u0 = sample_active(s.fem, [](double x) {
            return std::exp(-100.0 * (x - 0.25) * (x - 0.25)) + std::exp(-100.0 * (x - 0.75) * (x - 0.75));
        });
        break;
    case Problem::ScsaStatic:
        if (from_csv) {
            std::vector<double> xs(s.fem.coords.size());
            for (std::size_t i = 0; i < xs.size(); ++i)
                xs[i] = s.fem.coords[i][0];
            const std::vector<double> v = resample(signal, xs);
            s.u0 = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
        } else {
            s.u0 = sample_active(s.fem, double_gaussian_signal);
        }
        break;
    case Problem::Fkpp2dSquare:
        break;
    }
    return s;
}

MetricsReport run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    MetricsReport report;
    report.problem = cfg.problem;
    const ProblemSetup setup = build_problem(cfg);
    const ReducedBasis full = solve_schrodinger_eig(setup.fem, setup.u0, cfg.chi, max_modes(cfg, cfg.frobenius),
                                                    cfg.tol_deg);
    const std::vector<Vector> ref = reference_states(cfg, setup);

    std::vector<double> frob_ref;
    bool have_ref = false;
    if (cfg.frobenius) {
        try {
            frob_ref = run_alp(cfg, setup, full, cfg.nm_ref).traj.frob;
            have_ref = true;
        } catch (const std::exception& ex) {
            report.frobenius_error = ex.what();
        }
    }

    report.rows.resize(cfg.nm_list.size());
    parallel_for(cfg.nm_list.size(), cfg.threads, [&](std::size_t i) {
        report.rows[i] = evaluate_nm(cfg, setup, full, ref, have_ref ? &frob_ref : nullptr, cfg.nm_list[i]);
    });
    return report;
}

MetricsReport run_experiment_to_disk(const ExperimentConfig& cfg)
{
    const MetricsReport report = run_experiment(cfg);
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    const std::string p = to_string(cfg.problem);
    const ProblemSetup setup = build_problem(cfg);

    const bool eps_m = std::any_of(report.rows.begin(), report.rows.end(), [](const NmRow& r) { return r.has_eps_m; });
    {
        auto out = open_out(dir / (p + "_table.csv"));
        out << "nm,status,mean_eps_l2,max_eps_l2,eps_l2_tmax,max_eps_a,projection_error,max_fp_iterations,"
               "lambda_drift";
        if (eps_m)
            out << ",mean_eps_m,max_eps_m";
        if (cfg.soliton())
            out << ",n_negative,alpha_drift";
        out << "\n";
        for (const auto& r : report.rows) {
            out << r.nm << "," << (r.ok ? "ok" : "error");
            if (r.ok)
                out << "," << num(r.mean_l2) << "," << num(r.max_l2) << "," << num(r.l2_tmax) << ","
                    << num(r.eps_a_max) << "," << num(r.projection_error) << "," << r.max_iterations << ","
                    << num(r.lambda_drift);
            else
                out << ",,,,,,,";
            if (eps_m)
                out << "," << (r.has_eps_m ? num(r.mean_eps_m) : "") << "," << (r.has_eps_m ? num(r.max_eps_m) : "");
            if (cfg.soliton())
                out << "," << (r.ok ? std::to_string(r.n_negative) : "") << "," << (r.ok ? num(r.alpha_drift) : "");
            out << "\n";
        }
    }
    std::vector<std::string> status;
    if (!report.frobenius_error.empty())
        status.push_back("frobenius_reference = error: " + report.frobenius_error);
    for (const auto& r : report.rows) {
        status.push_back("nm_" + std::to_string(r.nm) + " = " + (r.ok ? "ok" : "error: " + r.error));
        if (!r.ok)
            continue;
        const std::string tag = p + "_nm" + std::to_string(r.nm);
        {
            auto out = open_out(dir / (tag + "_errors.csv"));
            out << "t,eps_l2,eps_a\n";
            for (std::size_t n = 0; n < r.t.size(); ++n)
                out << num(r.t[n]) << "," << num(r.eps_l2[n]) << "," << num(r.eps_a[n]) << "\n";
        }
        {
            auto out = open_out(dir / (tag + "_frobenius.csv"));
            out << "t_half,frob_m" << (r.has_eps_m && r.eps_m.size() == r.frob.size() ? ",eps_m" : "") << "\n";
            for (std::size_t n = 0; n < r.frob.size(); ++n) {
                out << num((static_cast<double>(n) + 0.5) * cfg.dt) << "," << num(r.frob[n]);
                if (r.has_eps_m && r.eps_m.size() == r.frob.size())
                    out << "," << num(r.eps_m[n]);
                out << "\n";
            }
        }
        for (std::size_t s = 0; s < r.snapshot_steps.size(); ++s)
            write_snapshot(dir / (tag + "_snapshot_step" + std::to_string(r.snapshot_steps[s]) + ".csv"), setup.fem,
                           r.snapshot_ref[s], r.snapshot_alp[s]);
    }
    write_manifest(cfg, "run", status);
    return report;
}

std::vector<FrobeniusRow> compare_frobenius(const ExperimentConfig& cfg)
{
    cfg.validate();
    const ProblemSetup setup = build_problem(cfg);
    const ReducedBasis full = solve_schrodinger_eig(setup.fem, setup.u0, cfg.chi, max_modes(cfg, true), cfg.tol_deg);
    const std::vector<double> ref = run_alp(cfg, setup, full, cfg.nm_ref).traj.frob;
    std::vector<FrobeniusRow> rows(cfg.nm_list.size());
    parallel_for(cfg.nm_list.size(), cfg.threads, [&](std::size_t i) {
        FrobeniusRow& row = rows[i];
        row.nm = cfg.nm_list[i];
        try {
            const std::vector<double> frob = run_alp(cfg, setup, full, row.nm).traj.frob;
            for (std::size_t n = 0; n < frob.size(); ++n)
                if (ref[n] > 0.0)
                    row.eps_m.push_back(frobenius_error_indicator(frob[n], ref[n]));
            if (row.eps_m.empty())
                throw AlpError("reference operator vanishes at every step");
            double s = 0.0;
            for (double e : row.eps_m)
                s += e;
            row.mean_eps_m = s / static_cast<double>(row.eps_m.size());
            row.max_eps_m = *std::max_element(row.eps_m.begin(), row.eps_m.end());
            row.ok = true;
        } catch (const std::exception& ex) {
            row.error = ex.what();
        }
        if (cfg.verbose)
            std::cerr << to_string(cfg.problem) << " eps_M N_M=" << row.nm << ": "
                      << (row.ok ? num(row.mean_eps_m) : row.error) << "\n";
    });
    return rows;
}

std::vector<FrobeniusRow> compare_frobenius_to_disk(const ExperimentConfig& cfg)
{
    const auto rows = compare_frobenius(cfg);
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    auto out = open_out(dir / (to_string(cfg.problem) + "_frobenius_table.csv"));
    out << "nm,status,mean_eps_m,max_eps_m\n";
    std::vector<std::string> status;
    for (const auto& r : rows) {
        out << r.nm << "," << (r.ok ? "ok," + num(r.mean_eps_m) + "," + num(r.max_eps_m) : std::string("error,,"))
            << "\n";
        status.push_back("nm_" + std::to_string(r.nm) + " = " + (r.ok ? "ok" : "error: " + r.error));
    }
    write_manifest(cfg, "frobenius", status);
    return rows;
}

ScsaReport run_scsa(const ExperimentConfig& cfg)
{
    ScsaReport rep;
    try {
        cfg.validate();
        const ProblemSetup setup = build_problem(cfg);
        rep.eigen = chi_sweep(setup.fem, setup.u0, cfg.chi_grid, cfg.n_modes_cap, ScsaMethod::Eigen, cfg.threads);
        const Shifted shifted = shift_nonnegative(setup.u0);
        rep.offset = shifted.offset;
        rep.soliton = chi_sweep(setup.fem, shifted.values, cfg.chi_grid, cfg.n_modes_cap, ScsaMethod::Soliton,
                                cfg.threads);
    } catch (const std::exception& ex) {
        rep.ok = false;
        rep.error = ex.what();
    }
    return rep;
}

ScsaReport run_scsa_to_disk(const ExperimentConfig& cfg)
{
    ScsaReport rep = run_scsa(cfg);
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    std::vector<std::string> status{std::string("scsa = ") + (rep.ok ? "ok" : "error: " + rep.error)};
    if (rep.ok) {
        {
            auto out = open_out(dir / "scsa_eigen.csv");
            out << "chi,n_modes,error\n";
            for (const auto& r : rep.eigen)
                out << num(r.chi) << "," << r.n_modes << "," << num(r.error) << "\n";
        }
        {
            auto out = open_out(dir / "scsa_soliton.csv");
            out << "chi,n_negative,error\n";
            for (const auto& r : rep.soliton)
                out << num(r.chi) << "," << r.n_modes << "," << num(r.error) << "\n";
        }
        {
            auto out = open_out(dir / "scsa_best.csv");
            out << "n_modes,chi_eigen,error_eigen\n";
            for (int n = 1; n <= cfg.n_modes_cap; ++n)
                if (const SweepRow* b = best_for_modes(rep.eigen, n))
                    out << n << "," << num(b->chi) << "," << num(b->error) << "\n";
        }
        try {
            const ProblemSetup setup = build_problem(cfg);
            const Expansion e = eigen_expansion(setup.fem, setup.u0, cfg.chi,
                                                std::min<int>(cfg.n_modes_cap, static_cast<int>(setup.fem.n_active())));
            const Shifted sh = shift_nonnegative(setup.u0);
            const Expansion s = soliton_expansion(setup.fem, sh.values, cfg.chi, cfg.tol_deg);
            auto out = open_out(dir / "scsa_snapshot.csv");
            out << "x,u,u_eigen,u_soliton\n";
            for (Eigen::Index i = 0; i < setup.u0.size(); ++i)
                out << num(setup.fem.coords[static_cast<std::size_t>(i)][0]) << "," << num(setup.u0[i]) << ","
                    << num(e.approx[i]) << "," << num(s.approx[i] + sh.offset) << "\n";
        } catch (const std::exception& ex) {
            rep.ok = false;
            rep.error = ex.what();
            status.push_back("snapshot = error: " + rep.error);
        }
    }
    write_manifest(cfg, "scsa", status);
    return rep;
}

std::vector<MetricsReport> run_chi_sweep_to_disk(const ExperimentConfig& cfg)
{
    if (cfg.chi_grid.empty())
        throw ConfigError("sweep: chi_grid must be nonempty");
    std::vector<MetricsReport> out;
    for (double chi : cfg.chi_grid) {
        ExperimentConfig c = cfg;
        c.chi = chi;
        c.output_dir = (fs::path(cfg.output_dir) / ("chi_" + num(chi))).string();
        out.push_back(run_experiment_to_disk(c));
    }
    return out;
}

}  // namespace alp
