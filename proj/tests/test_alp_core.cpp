#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace alp;

namespace {

struct Fixture {
    FemOperators fem;
    Vector u0;
    ReducedBasis basis;
};

Fixture advection_fixture(int n_modes)
{
    Fixture f;
    f.fem = support::line(0.0, 1.0, 200);
    f.u0 = sample_active(f.fem, [](double x) { return std::exp(-250.0 * (x - 0.25) * (x - 0.25)); });
    f.basis = solve_schrodinger_eig(f.fem, f.u0, 150.0, n_modes);
    return f;
}

Fixture fkpp_fixture(int n_modes)
{
    Fixture f;
    f.fem = support::line(0.0, 1.0, 100);
    f.u0 = sample_active(f.fem, [](double x) { return std::exp(-100.0 * (x - 0.5) * (x - 0.5)); });
    f.basis = solve_schrodinger_eig(f.fem, f.u0, 10.0, n_modes);
    return f;
}

}  // namespace

TEST_CASE("build_M two-mode example")
{
    Vector lambda(2);
    lambda << 0.0, 1.0;
    Tensor3 T(2);
    T(0, 1, 0) = T(1, 0, 0) = T(0, 0, 1) = 0.5;
    const Vector gamma = Vector::Unit(2, 0);
    const Matrix M = build_M(lambda, T, gamma, 1.0);
    CHECK(M(0, 1) == doctest::Approx(0.5));
    CHECK(M(1, 0) == doctest::Approx(-0.5));
    CHECK(M(0, 0) == 0.0);
    CHECK(M(1, 1) == 0.0);
    CHECK(build_M(lambda, T, gamma, 3.0)(0, 1) == doctest::Approx(1.5));
}

TEST_CASE("build_M skips degenerate pairs")
{
    Vector lambda(2);
    lambda << 1.0, 1.0;
    Tensor3 T(2);
    T(0, 1, 0) = T(1, 0, 0) = T(0, 0, 1) = 0.5;
    CHECK(build_M(lambda, T, Vector::Unit(2, 0), 1.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(build_M(lambda, T, Vector::Ones(3), 1.0), AlpError);
}

TEST_CASE("build_M coupling floor drops relatively tiny couplings")
{
    Vector lambda(3);
    lambda << 0.0, 1.0, 2.0;
    Tensor3 T(3);
    T(0, 1, 2) = 1.0;
    T(0, 2, 2) = 1e-10;
    T.symmetrize();
    const Vector gamma = Vector::Unit(3, 2);
    const Matrix full = build_M(lambda, T, gamma, 1.0);
    const Matrix cut = build_M(lambda, T, gamma, 1.0, kDefaultTolDeg, 1e-8);
    CHECK(full(0, 2) != 0.0);
    CHECK(cut(0, 2) == 0.0);
    CHECK(cut(0, 1) == full(0, 1));
    CHECK(cut(0, 1) != 0.0);
}

TEST_CASE("build_M is exactly skew for random data")
{
    const Vector lambda = support::random_vector(8, 11);
    const Tensor3 T = support::random_symmetric(8, 12);
    const Matrix M = build_M(lambda, T, support::random_vector(8, 13), 2.5);
    CHECK((M + M.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Frobenius and mode indicators")
{
    Matrix M(2, 2);
    M << 0.0, 3.0, -3.0, 0.0;
    CHECK(frobenius_indicator(M) == doctest::Approx(18.0));
    CHECK(mode_indicator(M, 0) == doctest::Approx(9.0));
    CHECK(frobenius_error_indicator(9.0, 10.0) == doctest::Approx(0.1));
    CHECK(frobenius_error_indicator(10.0, 10.0) == 0.0);
    CHECK_THROWS_AS(frobenius_error_indicator(1.0, 0.0), AlpError);
}

TEST_CASE("AlpConfig validation and step count")
{
    AlpConfig c;
    c.dt = 0.1;
    c.t_max = 1.0;
    CHECK(c.n_steps() == 10);
    AlpConfig bad = c;
    bad.dt = 2.0;
    CHECK_THROWS_AS(bad.validate(), AlpError);
    bad = c;
    bad.damping = 0.0;
    CHECK_THROWS_AS(bad.validate(), AlpError);
    bad = c;
    bad.tol_coupling = 1.0;
    CHECK_THROWS_AS(bad.validate(), AlpError);
    bad = c;
    bad.chi = -1.0;
    CHECK_THROWS_AS(bad.validate(), AlpError);
}

TEST_CASE("zero advection speed leaves the reduced state unchanged")
{
    const Fixture f = advection_fixture(10);
    const EquationModel model = EquationModel::advection(0.0, 150.0);
    AlpConfig cfg;
    cfg.chi = 150.0;
    cfg.dt = 0.01;
    cfg.t_max = 0.1;
    const Projection p = initial_projection(f.fem, f.basis, f.u0);
    const Trajectory traj = run(f.basis, f.fem, f.u0, p.beta, model, cfg);
    REQUIRE(traj.states.size() == 11);
    for (const auto& s : traj.states) {
        CHECK((s.coeffs - p.beta).cwiseAbs().maxCoeff() == 0.0);
        CHECK((s.lambda - f.basis.lambda).cwiseAbs().maxCoeff() == 0.0);
    }
    for (const auto& M : traj.m_half)
        CHECK(M.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closed-form generator -cD freezes the coefficients")
{
    const Fixture f = advection_fixture(20);
    EquationModel model = EquationModel::advection(0.5, 150.0);
    model.closed_form_generator = true;
    AlpConfig cfg;
    cfg.chi = 150.0;
    cfg.dt = 1.0 / 256.0;
    cfg.t_max = 0.25;
    const Projection p = initial_projection(f.fem, f.basis, f.u0);
    const Trajectory traj = run(f.basis, f.fem, f.u0, p.beta, model, cfg);
    double drift = 0.0;
    for (const auto& s : traj.states)
        drift = std::max(drift, (s.coeffs - p.beta).norm());
    CHECK(drift <= 1e-9);
}

TEST_CASE("FKPP run conserves ||T|| per step and keeps T symmetric")
{
    const Fixture f = fkpp_fixture(8);
    const EquationModel model = EquationModel::fkpp(5.0, 10.0);
    AlpConfig cfg;
    cfg.chi = 10.0;
    cfg.dt = 1e-4;
    cfg.t_max = 2e-3;
    cfg.keep_tensors = true;
    const Projection p = initial_projection(f.fem, f.basis, f.u0);
    const Trajectory traj = run(f.basis, f.fem, f.u0, p.beta, model, cfg);
    REQUIRE(traj.t_norm.size() == 21);
    REQUIRE(traj.states.size() == 21);
    for (std::size_t n = 1; n < traj.t_norm.size(); ++n)
        CHECK(std::abs(traj.t_norm[n] - traj.t_norm[n - 1]) / traj.t_norm[0] <= 10.0 * cfg.fp_tol);
    for (const auto& s : traj.states)
        CHECK(s.T.symmetry_defect() <= 1e-9);
    for (const auto& M : traj.m_half)
        CHECK((M + M.transpose()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(traj.frob.size() == 20);
    for (std::size_t n = 0; n < traj.frob.size(); ++n)
        CHECK(traj.frob[n] == doctest::Approx(traj.m_half[n].norm()));
}

TEST_CASE("t_max equal to dt gives two states")
{
    const Fixture f = fkpp_fixture(5);
    const EquationModel model = EquationModel::fkpp(5.0, 10.0);
    AlpConfig cfg;
    cfg.chi = 10.0;
    cfg.dt = 1e-4;
    cfg.t_max = 1e-4;
    const Projection p = initial_projection(f.fem, f.basis, f.u0);
    const Trajectory traj = run(f.basis, f.fem, f.u0, p.beta, model, cfg);
    CHECK(traj.states.size() == 2);
    CHECK(traj.m_half.size() == 1);
    CHECK(traj.states.back().t == doctest::Approx(1e-4));
}

TEST_CASE("fixed point that cannot converge raises AlpError")
{
    const Fixture f = fkpp_fixture(6);
    const EquationModel model = EquationModel::fkpp(5.0, 10.0);
    AlpConfig cfg;
    cfg.chi = 10.0;
    cfg.dt = 1e-3;
    cfg.t_max = 1e-2;
    cfg.fp_max_iters = 1;
    cfg.fp_tol = 1e-15;
    const Projection p = initial_projection(f.fem, f.basis, f.u0);
    CHECK_THROWS_AS(run(f.basis, f.fem, f.u0, p.beta, model, cfg), AlpError);
}

TEST_CASE("initial_state checks coefficient counts")
{
    const Fixture f = fkpp_fixture(5);
    CHECK_THROWS_AS(initial_state(f.basis, f.fem, f.u0, Vector::Zero(4), EquationModel::fkpp(5.0, 10.0)), AlpError);
    CHECK_THROWS_AS(initial_state(f.basis, f.fem, f.u0, Vector::Zero(6), EquationModel::kdv_soliton(10.0)), AlpError);
    const ReducedState s = initial_state(f.basis, f.fem, f.u0, Vector::Zero(5), EquationModel::kdv_eigen(10.0));
    CHECK(s.aux.count(AuxKind::D) == 1);
    CHECK(s.aux.count(AuxKind::D3) == 1);
    CHECK(s.T.dim() == 5);
}
