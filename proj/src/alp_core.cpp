#include "alp/alp_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace alp {

namespace {

double scaled_change(const double* next, const double* prev, std::size_t n)
{
    double diff = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diff = std::max(diff, std::abs(next[i] - prev[i]));
        mag = std::max(mag, std::abs(next[i]));
    }
    return diff / (1.0 + mag);
}

double state_change(const ReducedState& a, const ReducedState& b)
{
    double r = std::max(scaled_change(a.coeffs.data(), b.coeffs.data(), static_cast<std::size_t>(a.coeffs.size())),
                        scaled_change(a.lambda.data(), b.lambda.data(), static_cast<std::size_t>(a.lambda.size())));
    r = std::max(r, scaled_change(a.T.data(), b.T.data(), a.T.size()));
    for (const auto& [kind, X] : a.aux)
        r = std::max(r, scaled_change(X.data(), b.aux.at(kind).data(), static_cast<std::size_t>(X.size())));
    return r;
}

bool finite(const ReducedState& s)
{
    if (!s.coeffs.allFinite() || !s.lambda.allFinite())
        return false;
    for (std::size_t i = 0; i < s.T.size(); ++i)
        if (!std::isfinite(s.T.data()[i]))
            return false;
    for (const auto& [kind, X] : s.aux)
        if (!X.allFinite())
            return false;
    return true;
}

ReducedState midpoint(const ReducedState& a, const ReducedState& b)
{
    ReducedState m;
    m.coeffs = 0.5 * (a.coeffs + b.coeffs);
    m.lambda = 0.5 * (a.lambda + b.lambda);
    m.T = a.T;
    m.T.axpy(1.0, b.T);
    m.T *= 0.5;
    for (const auto& [kind, X] : a.aux)
        m.aux[kind] = 0.5 * (X + b.aux.at(kind));
    m.t = 0.5 * (a.t + b.t);
    return m;
}

void relax(ReducedState& guess, const ReducedState& update, double w)
{
    if (w == 1.0) {
        guess = update;
        return;
    }
    guess.coeffs = (1.0 - w) * guess.coeffs + w * update.coeffs;
    guess.lambda = (1.0 - w) * guess.lambda + w * update.lambda;
    guess.T *= (1.0 - w);
    guess.T.axpy(w, update.T);
    for (auto& [kind, X] : guess.aux)
        X = (1.0 - w) * X + w * update.aux.at(kind);
    guess.t = update.t;
}

}  // namespace

void AlpConfig::validate() const
{
    if (!(chi > 0.0))
        throw AlpError("AlpConfig: chi must be positive");
    if (!(dt > 0.0) || !(t_max > 0.0) || dt > t_max * (1.0 + 1e-12))
        throw AlpError("AlpConfig: need 0 < dt <= t_max");
    if (!(fp_tol > 0.0) || !(tol_deg > 0.0) || fp_max_iters < 1)
        throw AlpError("AlpConfig: tolerances must be positive");
    if (!(tol_coupling >= 0.0 && tol_coupling < 1.0))
        throw AlpError("AlpConfig: tol_coupling must lie in [0, 1)");
    if (!(damping > 0.0 && damping <= 1.0))
        throw AlpError("AlpConfig: damping must lie in (0, 1]");
}

int AlpConfig::n_steps() const
{
    return std::max(1, static_cast<int>(std::lround(t_max / dt)));
}

Matrix build_M(const Vector& lambda, const Tensor3& T, const Vector& gamma, double chi, double tol_deg,
               double tol_coupling)
{
    const Eigen::Index n = lambda.size();
    if (T.dim() != n || gamma.size() != n)
        throw AlpError("build_M: dimension mismatch");
    const Vector theta = T.unfold_last() * gamma;  // theta[i*n + j] = sum_m T_ijm gamma_m
    double floor = 0.0;
    if (tol_coupling > 0.0) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                floor = std::max(floor, std::abs(theta[i * n + j]));
        floor *= tol_coupling;
    }
    Matrix M = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double gap = lambda[j] - lambda[i];
            if (std::abs(gap) <= tol_deg * (1.0 + std::abs(lambda[i])))
                continue;
            if (floor > 0.0 && std::abs(theta[i * n + j]) <= floor)
                continue;
            const double v = chi / gap * theta[i * n + j];
            M(i, j) = v;
            M(j, i) = -v;
        }
    }
    return M;
}

double frobenius_indicator(const Matrix& M)
{
    return M.squaredNorm();
}

double mode_indicator(const Matrix& M, Eigen::Index m)
{
    return M.row(m).squaredNorm();
}

double frobenius_error_indicator(double frob_run, double frob_ref)
{
    if (!(frob_ref > 0.0))
        throw AlpError("frobenius_error_indicator: reference norm must be positive");
    return std::abs(frob_run - frob_ref) / frob_ref;
}

StepResult step_midpoint(const ReducedState& state, const EquationModel& model, const AlpConfig& cfg)
{
    const double dt = cfg.dt;
    const double chi = model.chi;
    const Eigen::Index n = state.lambda.size();
    const bool soliton = model.law() == CoefficientLaw::Soliton;

    StepResult out;
    ReducedState guess = state;
    guess.t = state.t + dt;
    ReducedState next;
    Matrix W;
    for (int iter = 1; iter <= cfg.fp_max_iters; ++iter) {
        const ReducedState half = midpoint(state, guess);
        const Vector gamma = model.gamma(half.coeffs, half.lambda, half.T, half.aux);
        if (model.closed_form_generator) {
            W = -model.c * half.aux.at(AuxKind::D);
        } else {
            W = build_M(half.lambda, half.T, gamma, chi, cfg.tol_deg, cfg.tol_coupling).transpose();
        }

        next.t = state.t + dt;
        if (soliton)
            next.coeffs = state.coeffs + dt * soliton_coefficient_rhs(half.coeffs, half.lambda,
                                                                      half.aux.at(AuxKind::D), W);
        else
            next.coeffs = state.coeffs + dt * (gamma - W * half.coeffs);

        next.T = state.T;
        next.T.axpy(dt, bracket3(W, half.T));

        next.lambda.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = 0.0;
            for (Eigen::Index h = 0; h < n; ++h)
                s += half.T(i, i, h) * gamma[h];
            next.lambda[i] = state.lambda[i] - chi * dt * s;
        }

        next.aux.clear();
        for (const auto& [kind, X] : half.aux)
            next.aux[kind] = state.aux.at(kind) + dt * commutator(X, W);

        if (!finite(next)) {
            std::ostringstream msg;
            msg << "step_midpoint: non-finite state at t = " << state.t << " (iteration " << iter << ")";
            throw AlpError(msg.str());
        }
        out.residual = state_change(next, guess);
        out.iterations = iter;
        relax(guess, next, cfg.damping);
        if (out.residual <= cfg.fp_tol)
            break;
    }
    if (out.residual > cfg.fp_tol) {
        std::ostringstream msg;
        msg << "step_midpoint: fixed point did not converge at t = " << state.t << " after " << out.iterations
            << " iterations (residual " << out.residual << ")";
        throw AlpError(msg.str());
    }
    out.state = std::move(guess);
    out.m_half = W.transpose();
    return out;
}

ReducedState initial_state(const ReducedBasis& basis, const FemOperators& fem, const Vector& u0,
                           const Vector& coeffs0, const EquationModel& model)
{
    ReducedState s;
    s.coeffs = coeffs0;
    s.lambda = basis.lambda;
    s.T = assemble_T(basis, fem);
    for (AuxKind kind : model.required_aux()) {
        if (kind == AuxKind::D)
            s.aux[kind] = assemble_D(basis, fem);
        else
            s.aux[kind] = assemble_D3(basis, fem, u0, basis.chi);
    }
    if (model.law() == CoefficientLaw::Standard && coeffs0.size() != basis.n_modes())
        throw AlpError("initial_state: coefficient count differs from the number of modes");
    if (model.law() == CoefficientLaw::Soliton && coeffs0.size() > basis.n_modes())
        throw AlpError("initial_state: more soliton coefficients than modes");
    s.t = 0.0;
    return s;
}

Trajectory integrate(ReducedState state, const EquationModel& model, const AlpConfig& cfg)
{
    cfg.validate();
    const int steps = cfg.n_steps();
    Trajectory traj;
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);
    traj.m_half.reserve(static_cast<std::size_t>(steps));
    traj.t_norm.push_back(state.T.frobenius_norm());
    traj.states.push_back(state);
    for (int n = 0; n < steps; ++n) {
        StepResult r = step_midpoint(state, model, cfg);
        r.state.t = (n + 1) * cfg.dt;
        state = std::move(r.state);
        traj.frob.push_back(std::sqrt(frobenius_indicator(r.m_half)));
        traj.m_half.push_back(std::move(r.m_half));
        traj.iterations.push_back(r.iterations);
        traj.t_norm.push_back(state.T.frobenius_norm());
        if (cfg.keep_tensors || n + 1 == steps) {
            traj.states.push_back(state);
        } else {
            ReducedState light;
            light.coeffs = state.coeffs;
            light.lambda = state.lambda;
            light.t = state.t;
            traj.states.push_back(std::move(light));
        }
    }
    return traj;
}

Trajectory run(const ReducedBasis& basis, const FemOperators& fem, const Vector& u0, const Vector& coeffs0,
               const EquationModel& model, const AlpConfig& cfg)
{
    return integrate(initial_state(basis, fem, u0, coeffs0, model), model, cfg);
}

}  // namespace alp
