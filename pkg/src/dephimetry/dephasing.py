"""Correlated Gaussian dephasing, exact and Monte Carlo.

Averaging exp(-i sum_j phi_j H_j) rho exp(+i ...) over zero-mean Gaussian
phases with covariance C multiplies entry (m, n) by the characteristic
function exp(-1/2 delta^T C delta), where delta_j = h_j(m_j) - h_j(n_j).
Because everything is diagonal in the same product basis this channel is
exact, trace preserving (diagonal entries see delta = 0), and commutes with
unitary phase encoding.

The conditional state given a fixed value of the weighted average phase is
again of product form: dephasing with the Schur-complement covariance
C' = C - delta2_c * ones followed by a rigid rotation by the conditioned
value, so d rho'_phi / d phi = -i [H, rho'_phi] exactly.
"""
from __future__ import annotations

import numpy as np

from .core import DensityMatrix, GeneratorSpec, HermitianOperator, _check_pairing, encode_phase
from .covariance import CovarianceMatrix, delta2_c
from .errors import NumericalConsistencyError
from .parallel import chunk_rngs, map_ordered

_SQRT_PSD_TOL = -1e-10


def _check_cov_pairing(gen: GeneratorSpec, cov: CovarianceMatrix) -> None:
    if cov.n != gen.nsites:
        raise ValueError(
            f"covariance is {cov.n}-site but generator has {gen.nsites} sites"
        )


def _pair_quadratic(gen: GeneratorSpec, cov: CovarianceMatrix) -> np.ndarray:
    """(dim, dim) matrix of delta^T C delta over basis-state pairs."""
    s = gen.site_energy_table
    gram = s.T @ (cov.entries @ s)
    gram = (gram + gram.T) / 2
    diag = np.diag(gram)
    quad = diag[:, None] + diag[None, :] - 2.0 * gram
    np.fill_diagonal(quad, 0.0)
    return quad


def dephase(rho: DensityMatrix, gen: GeneratorSpec, cov: CovarianceMatrix) -> DensityMatrix:
    """Apply the exact channel: entry (m, n) times exp(-1/2 delta^T C delta)."""
    _check_pairing(rho, gen)
    _check_cov_pairing(gen, cov)
    factor = np.exp(-0.5 * _pair_quadratic(gen, cov))
    return DensityMatrix(rho.entries * factor)


def covariance_sqrt(cov: CovarianceMatrix) -> np.ndarray:
    """Symmetric PSD square root of C, used for Gaussian phase sampling."""
    lam, vec = np.linalg.eigh(cov.entries)
    if lam[0] < _SQRT_PSD_TOL * max(1.0, lam[-1]):
        raise NumericalConsistencyError("covariance is not PSD within tolerance")
    root = (vec * np.sqrt(np.clip(lam, 0.0, None))) @ vec.T
    return (root + root.T) / 2


def sample_phases(
    cov: CovarianceMatrix, mean: float, rng: np.random.Generator, count: int
) -> np.ndarray:
    """(count, n) Gaussian phase draws with common mean and covariance C."""
    z = rng.standard_normal((count, cov.n))
    return mean + z @ covariance_sqrt(cov)


def dephase_monte_carlo(
    rho: DensityMatrix,
    gen: GeneratorSpec,
    cov: CovarianceMatrix,
    shots: int,
    seed: int,
) -> DensityMatrix:
    """Average exp(-i phi . H) rho exp(+i phi . H) over `shots` Gaussian draws.

    Conjugation by a diagonal unitary is entrywise, so the average reduces to
    multiplying rho entrywise by the empirical characteristic function, a
    Gram matrix, which keeps the sampled state positive.  Shots follow the
    fixed chunk partition of parallel.chunk_rngs, so the result depends only
    on (seed, shots).
    """
    _check_pairing(rho, gen)
    _check_cov_pairing(gen, cov)
    if shots < 1:
        raise ValueError("shots must be at least 1")
    root = covariance_sqrt(cov)
    table = gen.site_energy_table

    def run_chunk(job):
        rng, size = job
        phases = rng.standard_normal((size, cov.n)) @ root
        w = np.exp(-1j * (phases @ table))
        return w.T @ w.conj()

    pieces = map_ordered(run_chunk, chunk_rngs(seed, shots))
    factor = sum(pieces) / shots
    return DensityMatrix(rho.entries * factor)


def derivative_state(rho: DensityMatrix, gen: GeneratorSpec) -> HermitianOperator:
    """-i [H, rho], the generator of the encoded family; traceless Hermitian."""
    _check_pairing(rho, gen)
    energy = gen.energies
    d = -1j * (energy[:, None] - energy[None, :]) * rho.entries
    return HermitianOperator((d + d.conj().T) / 2)


def conditional_covariance(cov: CovarianceMatrix) -> CovarianceMatrix:
    """Schur complement C' = C - delta2_c * ones, the residual phase
    covariance once the weighted average phase is fixed."""
    d2 = delta2_c(cov)
    residual = cov.entries - d2
    lam = np.linalg.eigvalsh((residual + residual.T) / 2)
    if lam[0] < -1e-10 * max(1.0, float(np.abs(cov.entries).max())):
        raise NumericalConsistencyError("conditional covariance lost positivity")
    return CovarianceMatrix(residual, cov.regularization_eps)


def conditional_dephased_state(
    rho: DensityMatrix,
    gen: GeneratorSpec,
    cov: CovarianceMatrix,
    phi: float,
    phi0: float = 0.0,
) -> DensityMatrix:
    """State conditioned on the weighted average phase taking the value phi.

    Equals encode_phase(dephase(rho, C'), phi) with C' from
    conditional_covariance; the prior mean phi0 drops out of the conditional
    law and is accepted only for bookkeeping symmetry with the sampling API.
    """
    del phi0
    reduced = dephase(rho, gen, conditional_covariance(cov))
    return encode_phase(reduced, gen, phi)
