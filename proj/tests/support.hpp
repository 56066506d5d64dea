#pragma once

#include <cmath>
#include <random>

#include "alp/harness.hpp"

namespace support {

inline alp::FemOperators line(double a, double b, int intervals,
                              alp::BoundaryCondition bc = alp::BoundaryCondition::Dirichlet)
{
    return alp::assemble(alp::build_uniform_mesh_1d(a, b, intervals + 1), bc);
}

inline alp::Matrix random_skew(Eigen::Index n, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    alp::Matrix A(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            A(i, j) = dist(gen);
    return A - A.transpose();
}

inline alp::Tensor3 random_symmetric(Eigen::Index n, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    alp::Tensor3 T(n);
    for (std::size_t i = 0; i < T.size(); ++i)
        T.data()[i] = dist(gen);
    T.symmetrize();
    return T;
}

inline alp::Vector random_vector(Eigen::Index n, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    alp::Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = dist(gen);
    return v;
}

/// Composite Simpson rule on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// P1 interpolant of active-node values on a uniform Dirichlet mesh of [a, b].
struct P1Line {
    double a, b;
    int intervals;
    alp::Vector nodal;  // all nodes, zero at the ends

    P1Line(double a_, double b_, int intervals_, const alp::Vector& active)
        : a(a_), b(b_), intervals(intervals_), nodal(alp::Vector::Zero(intervals_ + 1))
    {
        nodal.segment(1, intervals - 1) = active;
    }

    double operator()(double x) const
    {
        const double h = (b - a) / intervals;
        int e = std::min(intervals - 1, std::max(0, static_cast<int>(std::floor((x - a) / h))));
        const double s = (x - (a + e * h)) / h;
        return (1.0 - s) * nodal[e] + s * nodal[e + 1];
    }
};

}  // namespace support
