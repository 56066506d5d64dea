#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

using namespace alp;

namespace {

/// bracket3 written out with explicit sums.
Tensor3 bracket3_loops(const Matrix& M, const Tensor3& T)
{
    const Eigen::Index n = T.dim();
    Tensor3 out(n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k) {
                double s = 0.0;
                for (Eigen::Index l = 0; l < n; ++l)
                    s += M(l, i) * T(l, j, k) + M(l, j) * T(i, l, k) + M(l, k) * T(i, j, l);
                out(i, j, k) = s;
            }
    return out;
}

double max_diff(const Tensor3& a, const Tensor3& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace

TEST_CASE("Tensor3 arithmetic")
{
    Tensor3 T(2);
    T(0, 0, 1) = 3.0;
    T(1, 1, 1) = 4.0;
    CHECK(T.frobenius_norm() == doctest::Approx(5.0));
    CHECK(T.dot(T) == doctest::Approx(25.0));
    CHECK(T.symmetry_defect() == doctest::Approx(3.0));
    T.symmetrize();
    CHECK(T.symmetry_defect() == 0.0);
    CHECK(T(0, 1, 0) == doctest::Approx(1.0));
    Tensor3 U = T;
    U *= 2.0;
    U.axpy(-2.0, T);
    CHECK(U.frobenius_norm() == 0.0);
    CHECK_THROWS_AS(T.dot(Tensor3(3)), std::invalid_argument);
    CHECK_THROWS_AS(T.axpy(1.0, Tensor3(3)), std::invalid_argument);
    CHECK(to_string(AuxKind::D) == "D");
    CHECK(to_string(AuxKind::D3) == "D3");
}

TEST_CASE("T_111 equals 1/sqrt|Omega| for the constant Neumann mode")
{
    const FemOperators fem = support::line(0.0, 4.0, 50, BoundaryCondition::Neumann);
    const ReducedBasis b = solve_schrodinger_eig(fem, Vector::Zero(fem.n_active()), 1.0, 3);
    const Tensor3 T = assemble_T(b, fem);
    CHECK(std::abs(T(0, 0, 0)) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(T.symmetry_defect() <= 1e-12);
}

TEST_CASE("assemble_T matches element-wise Simpson quadrature on a 5-node mesh")
{
    const int intervals = 6;
    const FemOperators fem = support::line(0.0, 1.0, intervals);
    REQUIRE(fem.n_active() == 5);
    const Vector u0 = sample_active(fem, [](double x) { return std::sin(3.0 * x) + x; });
    const ReducedBasis b = solve_schrodinger_eig(fem, u0, 7.0, 4);
    const Tensor3 T = assemble_T(b, fem);
    std::vector<support::P1Line> phi;
    for (Eigen::Index m = 0; m < 4; ++m)
        phi.emplace_back(0.0, 1.0, intervals, b.B.col(m));
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                auto f = [&](double x) { return phi[i](x) * phi[j](x) * phi[k](x); };
                double s = 0.0;
                for (int e = 0; e < intervals; ++e)
                    s += support::simpson(f, e / 6.0, (e + 1) / 6.0, 8);
                worst = std::max(worst, std::abs(T(i, j, k) - s));
            }
    CHECK(worst <= 1e-10);
}

TEST_CASE("D is skew-symmetric and D_12 matches the sine-mode integral")
{
    const FemOperators fem = support::line(0.0, 1.0, 1000);
    const ReducedBasis b = solve_schrodinger_eig(fem, Vector::Zero(fem.n_active()), 1.0, 4);
    const Matrix D = assemble_D(b, fem);
    CHECK((D + D.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    // phi_1 = s1 sqrt2 sin(pi x), phi_2 = s2 sqrt2 sin(2 pi x)
    const double s1 = b.B(499, 0) > 0 ? 1.0 : -1.0;
    const double s2 = b.B(249, 1) > 0 ? 1.0 : -1.0;
    const double exact = 4.0 * std::numbers::pi * support::simpson(
        [](double x) { return std::cos(2.0 * std::numbers::pi * x) * std::sin(std::numbers::pi * x); }, 0.0, 1.0, 2000);
    CHECK(exact == doctest::Approx(-8.0 / 3.0).epsilon(1e-10));
    CHECK(D(0, 1) == doctest::Approx(s1 * s2 * exact).epsilon(1e-4));
}

TEST_CASE("D matches an independent piecewise quadrature of the interpolants")
{
    const int intervals = 40;
    const FemOperators fem = support::line(-1.0, 2.0, intervals);
    const Vector u0 = sample_active(fem, [](double x) { return std::exp(-x * x); });
    const ReducedBasis b = solve_schrodinger_eig(fem, u0, 20.0, 5);
    const Matrix D = assemble_D(b, fem);
    const double h = 3.0 / intervals;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const support::P1Line pi(-1.0, 2.0, intervals, b.B.col(i));
            const support::P1Line pj(-1.0, 2.0, intervals, b.B.col(j));
            double s = 0.0;
            for (int e = 0; e < intervals; ++e) {
                const double xa = -1.0 + e * h;
                const double slope = (pj.nodal[e + 1] - pj.nodal[e]) / h;
                s += support::simpson([&](double x) { return slope * pi(x); }, xa, xa + h, 2);
            }
            CHECK(D(i, j) == doctest::Approx(s).epsilon(1e-10).scale(1.0));
        }
}

TEST_CASE("D3 for a zero potential is lambda_j times D_ji")
{
    const FemOperators fem = support::line(0.0, 1.0, 1000);
    const Vector u0 = Vector::Zero(fem.n_active());
    const ReducedBasis b = solve_schrodinger_eig(fem, u0, 1.0, 4);
    const Matrix D = assemble_D(b, fem);
    const Matrix D3 = assemble_D3(b, fem, u0, 1.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(D3(i, j) == doctest::Approx(b.lambda[j] * D(j, i)).epsilon(1e-10).scale(1.0));
    const double s1 = b.B(499, 0) > 0 ? 1.0 : -1.0;
    const double s2 = b.B(249, 1) > 0 ? 1.0 : -1.0;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(D3(0, 1) == doctest::Approx(s1 * s2 * 32.0 * pi2 / 3.0).epsilon(1e-3));
}

TEST_CASE("D and D3 argument checks")
{
    const FemOperators f1 = support::line(0.0, 1.0, 20);
    const Vector u0 = sample_active(f1, [](double x) { return x * (1.0 - x); });
    const ReducedBasis b = solve_schrodinger_eig(f1, u0, 5.0, 3);
    CHECK_THROWS_AS(assemble_D3(b, f1, u0, 6.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_D3(b, f1, Vector::Zero(3), 5.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_D3(b, f1, 2.0 * u0, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(sample_modes(f1, Matrix::Zero(4, 2)), std::invalid_argument);

    const FemOperators f2 = assemble(build_structured_square_mesh(5), BoundaryCondition::Neumann);
    const ReducedBasis b2 = solve_schrodinger_eig(f2, Vector::Zero(f2.n_active()), 1.0, 3);
    CHECK_THROWS_AS(assemble_D(b2, f2), std::invalid_argument);
}

TEST_CASE("bracket3 agrees with the explicit sum")
{
    const Matrix M = support::random_skew(5, 1) + 0.3 * Matrix::Identity(5, 5);
    Tensor3 T(5);
    const Vector v = support::random_vector(125, 2);
    std::copy(v.data(), v.data() + 125, T.data());
    CHECK(max_diff(bracket3(M, T), bracket3_loops(M, T)) <= 1e-12);
    CHECK_THROWS_AS(bracket3(Matrix::Zero(4, 4), T), std::invalid_argument);
}

TEST_CASE("bracket3 of a skew generator keeps T symmetric and is orthogonal to T")
{
    const Matrix M = support::random_skew(6, 3);
    const Tensor3 T = support::random_symmetric(6, 4);
    const Tensor3 B = bracket3(M, T);
    CHECK(B.symmetry_defect() <= 1e-12);
    CHECK(std::abs(B.dot(T)) <= 1e-11 * T.frobenius_norm() * B.frobenius_norm());
}

TEST_CASE("commutator examples")
{
    Matrix A(2, 2), B(2, 2), expected(2, 2);
    A << 0, 1, 0, 0;
    B << 0, 0, 1, 0;
    expected << 1, 0, 0, -1;
    CHECK((commutator(A, B) - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(commutator(A, A).cwiseAbs().maxCoeff() == 0.0);
    const Matrix X = support::random_skew(4, 5), Y = support::random_skew(4, 6);
    CHECK((commutator(X, Y) + commutator(Y, X)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(commutator(Matrix::Zero(2, 3), Matrix::Zero(2, 3)), std::invalid_argument);
}
