#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "frozen_values.hpp"
#include "support.hpp"

using namespace alp;

namespace {

Vector double_gaussian(const FemOperators& fem)
{
    return sample_active(fem, [](double x) {
        return std::exp(-250.0 * (x - 0.25) * (x - 0.25)) - std::exp(-250.0 * (x - 0.75) * (x - 0.75));
    });
}

std::string temp_file(const std::string& name, const std::string& text)
{
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p.string();
}

}  // namespace

TEST_CASE("zero signal has zero expansion error")
{
    const FemOperators fem = support::line(0.0, 1.0, 50);
    const Expansion e = eigen_expansion(fem, Vector::Zero(fem.n_active()), 10.0, 5);
    CHECK(e.error == 0.0);
    CHECK(e.approx.norm() == 0.0);
}

TEST_CASE("full eigen expansion reproduces the signal")
{
    const FemOperators fem = support::line(0.0, 1.0, 40);
    const Vector u = double_gaussian(fem);
    CHECK(eigen_expansion(fem, u, 250.0, static_cast<int>(fem.n_active())).error <= 1e-10);
    CHECK_THROWS_AS(eigen_expansion(fem, u, 250.0, 0), ScsaError);
    CHECK_THROWS_AS(eigen_expansion(fem, u, 250.0, static_cast<int>(fem.n_active()) + 1), ScsaError);
    CHECK_THROWS_AS(eigen_expansion(fem, u, 0.0, 3), ScsaError);
}

TEST_CASE("double Gaussian eigen-expansion errors match the frozen oracle values")
{
    const FemOperators fem = support::line(0.0, 1.0, 500);
    const Vector u = double_gaussian(fem);
    CHECK(eigen_expansion(fem, u, 250.0, 10).error == doctest::Approx(frozen::kScsaEigenErrChi250N10).epsilon(1e-6));
    CHECK(eigen_expansion(fem, u, 250.0, 20).error == doctest::Approx(frozen::kScsaEigenErrChi250N20).epsilon(1e-6));
    CHECK(eigen_expansion(fem, u, 250.0, 30).error == doctest::Approx(frozen::kScsaEigenErrChi250N30).epsilon(1e-5));
}

TEST_CASE("soliton expansion without bound states has error 1")
{
    const FemOperators fem = support::line(0.0, 1.0, 100);
    const Vector u = sample_active(fem, [](double x) { return x * (1.0 - x); });
    const Expansion e = soliton_expansion(fem, u, 1.0);
    CHECK(e.n_negative == 0);
    CHECK(e.error == doctest::Approx(1.0));
}

TEST_CASE("reflectionless 2 sech^2 is reproduced by one squared mode")
{
    const FemOperators fem = support::line(-15.0, 15.0, 1000);
    const Vector u = sample_active(fem, [](double x) { return 2.0 / (std::cosh(x) * std::cosh(x)); });
    const Expansion e = soliton_expansion(fem, u, 1.0);
    CHECK(e.n_negative == 1);
    CHECK(e.error <= 2e-2);
    CHECK(e.error == doctest::Approx(frozen::kReflectionlessSolitonErr).epsilon(1e-4));
    CHECK(solve_schrodinger_eig(fem, u, 1.0, 1).lambda[0] ==
          doctest::Approx(frozen::kReflectionlessLambda1).epsilon(1e-10));
}

TEST_CASE("soliton expansion rejects negative signals and bad sizes")
{
    const FemOperators fem = support::line(0.0, 1.0, 50);
    const Vector u = double_gaussian(fem);
    CHECK_THROWS_AS(soliton_expansion(fem, u, 250.0), ScsaError);
    CHECK_THROWS_AS(soliton_expansion(fem, Vector::Ones(3), 250.0), ScsaError);
}

TEST_CASE("shift_nonnegative examples")
{
    Vector u(3);
    u << 2.0, -1.0, 0.5;
    const Shifted s = shift_nonnegative(u);
    CHECK(s.offset == doctest::Approx(-1.0));
    CHECK(s.values[0] == doctest::Approx(3.0));
    CHECK(s.values[1] == 0.0);
    CHECK(s.values[2] == doctest::Approx(1.5));
}

TEST_CASE("bound-state count is nondecreasing in chi")
{
    const FemOperators fem = support::line(0.0, 1.0, 200);
    const Vector u = shift_nonnegative(double_gaussian(fem)).values;
    const std::vector<SweepRow> rows = chi_sweep(fem, u, {50.0, 200.0, 800.0, 3200.0}, 50, ScsaMethod::Soliton);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i].n_modes >= rows[i - 1].n_modes);
    CHECK(rows.back().n_modes > rows.front().n_modes);
}

TEST_CASE("eigen chi sweep rows, best row and thread determinism")
{
    const FemOperators fem = support::line(0.0, 1.0, 100);
    const Vector u = double_gaussian(fem);
    const std::vector<double> grid{100.0, 250.0, 400.0};
    const std::vector<SweepRow> one = chi_sweep(fem, u, {250.0}, 5, ScsaMethod::Eigen);
    REQUIRE(one.size() == 5);
    for (int n = 1; n <= 5; ++n) {
        CHECK(one[static_cast<std::size_t>(n - 1)].n_modes == n);
        CHECK(one[static_cast<std::size_t>(n - 1)].chi == 250.0);
    }
    const std::vector<SweepRow> a = chi_sweep(fem, u, grid, 8, ScsaMethod::Eigen, 1);
    const std::vector<SweepRow> b = chi_sweep(fem, u, grid, 8, ScsaMethod::Eigen, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].chi == b[i].chi);
        CHECK(a[i].n_modes == b[i].n_modes);
        CHECK(a[i].error == b[i].error);
    }
    const SweepRow* best = best_for_modes(a, 8);
    REQUIRE(best != nullptr);
    for (const auto& r : a)
        if (r.n_modes == 8)
            CHECK(best->error <= r.error);
    CHECK(best_for_modes(a, 9) == nullptr);
    CHECK_THROWS_AS(chi_sweep(fem, u, {}, 8, ScsaMethod::Eigen), ScsaError);
}

TEST_CASE("signal CSV reading with header and resampling")
{
    const std::string path = temp_file("alp_signal_test.csv", "x,value\n0,0\n0.5,1\n2,4\n");
    const Signal s = read_signal_csv(path);
    REQUIRE(s.x.size() == 3);
    CHECK(s.value[2] == 4.0);
    const std::vector<double> r = resample(s, {0.0, 0.25, 1.25, 2.0, 3.0});
    CHECK(r[0] == 0.0);
    CHECK(r[1] == doctest::Approx(0.5));
    CHECK(r[2] == doctest::Approx(2.5));
    CHECK(r[3] == doctest::Approx(4.0));
    CHECK(r[4] == doctest::Approx(4.0));
    std::filesystem::remove(path);

    const std::string bad = temp_file("alp_signal_bad.csv", "0,1\n0,2\n");
    CHECK_THROWS_AS(read_signal_csv(bad), ScsaError);
    std::filesystem::remove(bad);
    const std::string junk = temp_file("alp_signal_junk.csv", "0,1\nabc,2\n");
    CHECK_THROWS_AS(read_signal_csv(junk), ScsaError);
    std::filesystem::remove(junk);
    CHECK_THROWS_AS(read_signal_csv("/nonexistent/signal.csv"), ScsaError);
}
