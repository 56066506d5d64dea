#include "alp/models.hpp"

#include <cmath>
#include <stdexcept>

namespace alp {

namespace {

const Matrix& require(const AuxMap& aux, AuxKind kind)
{
    auto it = aux.find(kind);
    if (it == aux.end())
        throw std::invalid_argument("model needs auxiliary matrix " + std::string(to_string(kind)));
    return it->second;
}

}  // namespace

EquationModel EquationModel::advection(double c, double chi)
{
    EquationModel m;
    m.kind = ModelKind::Advection;
    m.c = c;
    m.chi = chi;
    return m;
}

EquationModel EquationModel::kdv_eigen(double chi)
{
    EquationModel m;
    m.kind = ModelKind::KdvEigen;
    m.chi = chi;
    return m;
}

EquationModel EquationModel::fkpp(double nu, double chi)
{
    if (!(nu > 0.0))
        throw std::invalid_argument("fkpp model: nu must be positive");
    EquationModel m;
    m.kind = ModelKind::Fkpp;
    m.nu = nu;
    m.chi = chi;
    return m;
}

EquationModel EquationModel::kdv_soliton(double chi, SolitonClosure closure)
{
    EquationModel m;
    m.kind = ModelKind::KdvSoliton;
    m.chi = chi;
    m.soliton_closure = closure;
    return m;
}

std::string_view EquationModel::name() const
{
    switch (kind) {
    case ModelKind::Advection:
        return "advection";
    case ModelKind::KdvEigen:
        return "kdv_eigen";
    case ModelKind::Fkpp:
        return "fkpp";
    case ModelKind::KdvSoliton:
        return "kdv_soliton";
    }
    return "?";
}

CoefficientLaw EquationModel::law() const
{
    return kind == ModelKind::KdvSoliton ? CoefficientLaw::Soliton : CoefficientLaw::Standard;
}

std::vector<AuxKind> EquationModel::required_aux() const
{
    switch (kind) {
    case ModelKind::Advection:
    case ModelKind::KdvSoliton:
        return {AuxKind::D};
    case ModelKind::KdvEigen:
        return {AuxKind::D, AuxKind::D3};
    case ModelKind::Fkpp:
        return {};
    }
    return {};
}

Vector EquationModel::gamma(const Vector& coeffs, const Vector& lambda, const Tensor3& T, const AuxMap& aux) const
{
    switch (kind) {
    case ModelKind::Advection:
        return gamma_advection(coeffs, require(aux, AuxKind::D), c);
    case ModelKind::KdvEigen:
        return gamma_kdv_eigen(coeffs, lambda, require(aux, AuxKind::D), require(aux, AuxKind::D3), chi);
    case ModelKind::Fkpp:
        return gamma_fkpp(coeffs, lambda, T, chi, nu);
    case ModelKind::KdvSoliton:
        return gamma_kdv_soliton(coeffs, lambda, require(aux, AuxKind::D), T, soliton_closure);
    }
    throw std::logic_error("unknown model");
}

Vector gamma_advection(const Vector& beta, const Matrix& D, double c)
{
    if (D.cols() != beta.size())
        throw std::invalid_argument("gamma_advection: dimension mismatch");
    return -c * (D * beta);
}

Vector gamma_kdv_eigen(const Vector& beta, const Vector& lambda, const Matrix& D, const Matrix& D3, double chi)
{
    if (!(chi > 0.0))
        throw std::invalid_argument("gamma_kdv_eigen: chi must be positive");
    if (D.cols() != beta.size() || D3.cols() != beta.size() || lambda.size() != beta.size())
        throw std::invalid_argument("gamma_kdv_eigen: dimension mismatch");
    const Vector lb = lambda.cwiseProduct(beta);
    return (3.0 / chi) * (D * lb) - (1.0 - 3.0 / chi) * (D3 * beta);
}

Vector gamma_fkpp(const Vector& beta, const Vector& lambda, const Tensor3& T, double chi, double nu)
{
    const Eigen::Index n = beta.size();
    if (lambda.size() != n || T.dim() != n)
        throw std::invalid_argument("gamma_fkpp: dimension mismatch");
    // sum_jk T_ijk beta_j beta_k via the (i, jk) unfolding
    Vector outer(n * n);
    for (Eigen::Index j = 0; j < n; ++j)
        outer.segment(j * n, n) = beta[j] * beta;
    const Vector quad = T.unfold_first() * outer;
    return (Vector::Constant(n, nu) - lambda).cwiseProduct(beta) - (chi + nu) * quad;
}

Vector gamma_kdv_soliton(const Vector& alpha, const Vector& lambda, const Matrix& D, const Tensor3& T,
                         SolitonClosure closure)
{
    const Eigen::Index n = D.rows();
    const Eigen::Index ns = alpha.size();
    if (ns > n || lambda.size() != n)
        throw std::invalid_argument("gamma_kdv_soliton: dimension mismatch");
    const Vector w = lambda.head(ns).cwiseProduct(alpha);
    if (closure == SolitonClosure::DerivativeProjection)
        return 8.0 * D.leftCols(ns) * w;

    if (T.dim() != n)
        throw std::invalid_argument("gamma_kdv_soliton: tensor dimension mismatch");
    // <phi_j phi_j', phi_i> ~ sum_l D_lj T_ijl
    Vector g = Vector::Zero(n);
    for (Eigen::Index j = 0; j < ns; ++j) {
        const Vector dphi = D.col(j);
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = 0.0;
            for (Eigen::Index l = 0; l < n; ++l)
                s += T(i, j, l) * dphi[l];
            g[i] += 8.0 * w[j] * s;
        }
    }
    return g;
}

Vector soliton_coefficient_rhs(const Vector& alpha, const Vector& lambda, const Matrix& D, const Matrix& W)
{
    const Eigen::Index ns = alpha.size();
    if (D.rows() < ns || W.rows() < ns || lambda.size() < ns)
        throw std::invalid_argument("soliton_coefficient_rhs: dimension mismatch");
    const Matrix A = W.topLeftCorner(ns, ns) - 4.0 * D.topLeftCorner(ns, ns) * lambda.head(ns).asDiagonal();
    return -2.0 * (A * alpha);
}

Vector soliton_initial_coefficients(const Vector& lambda, double chi, double tol)
{
    Eigen::Index count = 0;
    while (count < lambda.size() && lambda[count] < -tol)
        ++count;
    Vector alpha(count);
    for (Eigen::Index i = 0; i < count; ++i)
        alpha[i] = 4.0 * std::sqrt(-lambda[i]) / chi;
    return alpha;
}

}  // namespace alp
