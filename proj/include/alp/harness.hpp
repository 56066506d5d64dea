#pragma once

#include <string>
#include <vector>

#include "alp/reconstruct.hpp"
#include "alp/reference.hpp"
#include "alp/scsa.hpp"

namespace alp {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Problem { Advection, Kdv1Eigen, Kdv3Eigen, Kdv1Soliton, Kdv3Soliton, Fkpp1d, Fkpp2dSquare, ScsaStatic };

std::string to_string(Problem p);
Problem problem_from_string(const std::string& s);

/// How the time-averaged error is formed from eps_L2(t).
enum class MeanKind {
    Linear,  // (1/T) int eps dt
    Rms,     // sqrt((1/T) int eps^2 dt)
};

struct ExperimentConfig {
    Problem problem = Problem::Advection;

    // 1D interval [a, b] with `intervals` elements; 2D unit square with n_per_side^2 vertices
    double a = 0.0;
    double b = 1.0;
    int intervals = 500;
    int n_per_side = 55;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;

    double chi = 150.0;
    std::vector<int> nm_list{10, 12, 14, 16, 18, 20};
    double dt = 1.0 / 256.0;
    double t_max = 1.0;

    double c = 0.5;                   // advection speed
    double nu = 0.0;                  // logistic rate
    double beta_speed = 4.0;          // one-soliton speed
    double x0 = 0.0;                  // one-soliton position
    std::vector<double> sol_c;        // multi-soliton scattering data
    std::vector<double> sol_k;
    SolitonClosure closure = SolitonClosure::SquaredModeDerivative;
    bool closed_form_generator = false;

    double fp_tol = 1e-11;
    int fp_max_iters = 100;
    double damping = 1.0;
    double tol_deg = kDefaultTolDeg;
    double tol_coupling = 0.0;

    bool frobenius = false;  // also compute eps_M against an nm_ref run
    int nm_ref = 50;

    // static signal approximation
    std::vector<double> chi_grid;
    int n_modes_cap = 50;
    std::string signal_csv;  // empty: built-in double Gaussian

    std::string output_dir = "out";
    int threads = 1;
    bool verbose = false;

    MeanKind mean_kind() const;
    bool soliton() const;
    void validate() const;
};

ExperimentConfig preset(Problem p);

/// INI file: [experiment] problem=..., then optional overrides of the preset.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);
/// Canonical INI text of every field; load/parse round-trips it.
std::string to_ini(const ExperimentConfig& cfg);
/// CRC-32 of to_ini(cfg), hex.
std::string config_hash(const ExperimentConfig& cfg);

/// sqrt(||u_ref - u_alp||_G^2 / ||u_ref||_G^2)
double eps_l2(const FemOperators& fem, const Vector& u_ref, const Vector& u_alp);
/// |max u_ref - max u_alp|
double eps_amplitude(const Vector& u_ref, const Vector& u_alp);

/// Time average over uniformly spaced samples (trapezoidal rule).
double time_mean(const std::vector<double>& values, MeanKind kind);

struct NmRow {
    int nm = 0;
    bool ok = false;
    std::string error;

    double mean_l2 = 0.0;
    double max_l2 = 0.0;
    double l2_tmax = 0.0;
    double eps_a_max = 0.0;
    double projection_error = 0.0;  // relative, at t = 0
    int max_iterations = 0;
    double runtime_s = 0.0;

    bool has_eps_m = false;
    double mean_eps_m = 0.0;
    double max_eps_m = 0.0;

    bool has_alpha = false;
    int n_negative = 0;
    double alpha_drift = 0.0;  // max_t max_i |alpha_i(t) - alpha_i(0)|

    double lambda_drift = 0.0;  // max_t max_i |lambda_i(t) - lambda_i(0)| / (1 + |lambda_i(0)|)

    std::vector<double> t;
    std::vector<double> eps_l2;
    std::vector<double> eps_a;
    std::vector<double> frob;   // ||M^(n+1/2)||_F, one per step
    std::vector<double> eps_m;  // one per step when has_eps_m

    std::vector<int> snapshot_steps;  // steps nearest to 0, T/4, T/2, T
    std::vector<Vector> snapshot_ref;
    std::vector<Vector> snapshot_alp;
};

struct MetricsReport {
    Problem problem = Problem::Advection;
    std::vector<NmRow> rows;
    std::string frobenius_error;  // failure of the reference run, if any

    bool all_ok() const;
    const NmRow* find(int nm) const;
};

/// Runs every N_M of the config and returns the metrics without touching the file system.
MetricsReport run_experiment(const ExperimentConfig& cfg);

/// run_experiment plus table, per-time and snapshot CSVs and a manifest in cfg.output_dir.
MetricsReport run_experiment_to_disk(const ExperimentConfig& cfg);

struct FrobeniusRow {
    int nm = 0;
    bool ok = false;
    std::string error;
    double mean_eps_m = 0.0;
    double max_eps_m = 0.0;
    std::vector<double> eps_m;
};

/// eps_M(t) = | ||M_N||_F - ||M_ref||_F | / ||M_ref||_F with the reference at cfg.nm_ref modes.
std::vector<FrobeniusRow> compare_frobenius(const ExperimentConfig& cfg);
std::vector<FrobeniusRow> compare_frobenius_to_disk(const ExperimentConfig& cfg);

struct ScsaReport {
    std::vector<SweepRow> eigen;
    std::vector<SweepRow> soliton;  // on the shifted signal
    double offset = 0.0;
    bool ok = true;
    std::string error;
};

/// Chi sweeps of both expansions on the configured static signal.
ScsaReport run_scsa(const ExperimentConfig& cfg);
ScsaReport run_scsa_to_disk(const ExperimentConfig& cfg);

/// Sweep of run_experiment over cfg.chi_grid; one report per grid value.
std::vector<MetricsReport> run_chi_sweep_to_disk(const ExperimentConfig& cfg);

/// Mesh, operators and nodal initial datum for a config.
struct ProblemSetup {
    FemOperators fem;
    Vector u0;
};
ProblemSetup build_problem(const ExperimentConfig& cfg);

}  // namespace alp
