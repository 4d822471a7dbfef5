"""Shared factories and independent oracles for the test suite."""
from __future__ import annotations

import numpy as np
from numpy.polynomial.hermite import hermgauss

from dephimetry import (
    CovarianceMatrix,
    DensityMatrix,
    GeneratorSpec,
    Povm,
    weights,
)
from dephimetry.dephasing import covariance_sqrt

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def ginibre(r: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return r.normal(size=(rows, cols)) + 1j * r.normal(size=(rows, cols))


def random_density(r: np.random.Generator, dim: int) -> DensityMatrix:
    """Full-rank state from a Ginibre square."""
    g = ginibre(r, dim, 2 * dim)
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_pure_density(r: np.random.Generator, dim: int) -> DensityMatrix:
    v = ginibre(r, dim, 1)[:, 0]
    v /= np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()))


def random_psd_cov(r: np.random.Generator, n: int, scale: float = 0.5) -> CovarianceMatrix:
    """Well-conditioned random covariance."""
    b = r.normal(size=(n, n + 2))
    return CovarianceMatrix(scale * (b @ b.T) / (n + 2))


def random_projective_povm(r: np.random.Generator, dim: int) -> Povm:
    q, _ = np.linalg.qr(ginibre(r, dim, dim))
    return Povm.projective(q)


def tilted_qubit_basis(theta: float) -> np.ndarray:
    """Eigenbasis of sin(theta) sigma_x + cos(theta) sigma_y, as columns."""
    _, vec = np.linalg.eigh(np.sin(theta) * SIGMA_X + np.cos(theta) * SIGMA_Y)
    return vec


def phase_profile_state(rho: DensityMatrix, gen: GeneratorSpec, theta: np.ndarray) -> np.ndarray:
    """Encode one phase per site: entries rho_mn exp(-i (E_m(theta) - E_n(theta)))."""
    w = np.exp(-1j * (np.asarray(theta, dtype=float) @ gen.site_energy_table))
    return rho.entries * np.outer(w, w.conj())


def gh_bayes_mse(
    rho: DensityMatrix,
    gen: GeneratorSpec,
    cov: CovarianceMatrix,
    povm: Povm,
    estimates: np.ndarray,
    phi0: float = 0.0,
    nodes: int = 7,
) -> float:
    """Tensor Gauss-Hermite quadrature for E[(estimate(x) - w . theta)^2]
    with theta ~ N(phi0 1, C).  Independent of the estimator identities
    under test; cost nodes**nsites."""
    n = gen.nsites
    z, wts = hermgauss(nodes)
    root = covariance_sqrt(cov)
    w_vec = weights(cov).gamma
    total = 0.0
    grids = np.meshgrid(*([z] * n), indexing="ij")
    zs = np.stack([g.ravel() for g in grids], axis=1)
    wprod = np.prod(
        np.stack(np.meshgrid(*([wts] * n), indexing="ij"), axis=0).reshape(n, -1), axis=0
    )
    for k in range(zs.shape[0]):
        theta = phi0 + np.sqrt(2.0) * (root @ zs[k])
        probs = np.array(
            [np.trace(e @ phase_profile_state(rho, gen, theta)).real for e in povm.effects]
        )
        target = float(w_vec @ theta)
        total += wprod[k] * float(probs @ (estimates - target) ** 2)
    return total / np.pi ** (n / 2.0)


def gh_site_estimates(
    rho: DensityMatrix,
    gen: GeneratorSpec,
    cov: CovarianceMatrix,
    povm: Povm,
    phi0: float = 0.0,
    nodes: int = 7,
) -> np.ndarray:
    """Posterior means E[theta_j | x] by direct tensor Gauss-Hermite
    quadrature of the defining integrals; (outcomes, nsites) array."""
    n = gen.nsites
    z, wts = hermgauss(nodes)
    root = covariance_sqrt(cov)
    grids = np.meshgrid(*([z] * n), indexing="ij")
    zs = np.stack([g.ravel() for g in grids], axis=1)
    wprod = np.prod(
        np.stack(np.meshgrid(*([wts] * n), indexing="ij"), axis=0).reshape(n, -1), axis=0
    )
    numer = np.zeros((povm.outcomes, n))
    denom = np.zeros(povm.outcomes)
    for k in range(zs.shape[0]):
        theta = phi0 + np.sqrt(2.0) * (root @ zs[k])
        state = phase_profile_state(rho, gen, theta)
        probs = np.array([np.trace(e @ state).real for e in povm.effects])
        numer += wprod[k] * probs[:, None] * theta[None, :]
        denom += wprod[k] * probs
    return numer / denom[:, None]


def delta2_brute(cov: CovarianceMatrix) -> float:
    """1 / (1^T C^{-1} 1) via plain inv; oracle for the solver route."""
    n = cov.entries.shape[0]
    return 1.0 / float(np.ones(n) @ np.linalg.inv(cov.entries) @ np.ones(n))


def dephase_factor_loops(cov: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Entrywise attenuation exp(-0.5 delta^T C delta) by explicit loops;
    oracle for the vectorized channel."""
    nsites, dim = table.shape
    out = np.empty((dim, dim))
    for m in range(dim):
        for n_ in range(dim):
            delta = table[:, m] - table[:, n_]
            out[m, n_] = np.exp(-0.5 * float(delta @ cov @ delta))
    return out
