"""Independent oracle for the frozen regression values in tests/frozen_values.hpp.

Builds the P1 matrices with closed-form element integrals (no quadrature) and
solves the generalized eigenproblems with scipy. Run once; paste the output.
"""
import numpy as np
from scipy.linalg import eigh


def p1_dirichlet(a, b, intervals, u):
    """Interior-node mass, stiffness and potential-weighted mass on a uniform mesh."""
    n = intervals + 1
    x = np.linspace(a, b, n)
    h = (b - a) / intervals
    G = np.zeros((n, n))
    K = np.zeros((n, n))
    W = np.zeros((n, n))
    uu = u(x)
    for e in range(intervals):
        i, j = e, e + 1
        ua, ub = uu[i], uu[j]
        G[np.ix_([i, j], [i, j])] += h / 6 * np.array([[2, 1], [1, 2]])
        K[np.ix_([i, j], [i, j])] += 1 / h * np.array([[1, -1], [-1, 1]])
        W[np.ix_([i, j], [i, j])] += h / 12 * np.array(
            [[3 * ua + ub, ua + ub], [ua + ub, ua + 3 * ub]])
    s = slice(1, n - 1)
    return x[s], G[s, s], K[s, s], W[s, s], uu[s]


def eig(G, K, W, chi, n):
    lam, B = eigh(K - chi * W, G, subset_by_index=[0, n - 1])
    return lam, B


def rel_proj_error(G, B, u):
    beta = B.T @ G @ u
    r = u - B @ beta
    return np.sqrt(r @ G @ r) / np.sqrt(u @ G @ u)


def main():
    gauss = lambda x: np.exp(-250 * (x - 0.25) ** 2)
    x, G, K, W, u = p1_dirichlet(0.0, 1.0, 500, gauss)
    lam, B = eig(G, K, W, 150.0, 20)
    print(f"ADVECTION_PROJ_ERR_CHI150_N20 = {rel_proj_error(G, B, u):.17g}")

    dg = lambda x: np.exp(-250 * (x - 0.25) ** 2) - np.exp(-250 * (x - 0.75) ** 2)
    x, G, K, W, u = p1_dirichlet(0.0, 1.0, 500, dg)
    lam, B = eig(G, K, W, 250.0, 30)
    for n in (10, 20, 30):
        print(f"SCSA_EIGEN_ERR_CHI250_N{n} = {rel_proj_error(G, B[:, :n], u):.17g}")

    sech2 = lambda x: 2.0 / np.cosh(x) ** 2
    x, G, K, W, u = p1_dirichlet(-15.0, 15.0, 1000, sech2)
    lam, B = eig(G, K, W, 1.0, 3)
    neg = lam[lam < -1e-8]
    approx = sum(4.0 * np.sqrt(-l) * B[:, m] ** 2 for m, l in enumerate(neg))
    r = u - approx
    print(f"REFLECTIONLESS_LAMBDA1 = {lam[0]:.17g}")
    print(f"REFLECTIONLESS_N_NEGATIVE = {len(neg)}")
    print(f"REFLECTIONLESS_SOLITON_ERR = {np.sqrt(r @ G @ r) / np.sqrt(u @ G @ u):.17g}")

    one = lambda x: 2.0 / np.cosh(x) ** 2
    x, G, K, W, u = p1_dirichlet(-5.0, 23.0, 500, one)
    lam, B = eig(G, K, W, 1.0, 2)
    print(f"KDV1_LAMBDA1 = {lam[0]:.17g}")
    print(f"KDV1_LAMBDA2 = {lam[1]:.17g}")


if __name__ == "__main__":
    main()
