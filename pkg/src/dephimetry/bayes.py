"""Bayesian phase estimation with Gaussian priors over correlated site phases.

The site phases are jointly Gaussian with mean phi0 (the informed guess)
and covariance C.  Gaussian integration by parts collapses the posterior
mean of each site phase to commutator traces on the averaged state:

    est_j(x) = phi0 + sum_k C_jk Tr(-i [H_k, rho_bar] Pi_x) / p(x),

and the optimally weighted combination est = sum_j gamma_j est_j obeys
    est(x) - phi0 = delta2_c * d/dphi log p_phi(x) at phi0.
Two exact consequences drive the tests here: the local second moment of
est equals delta2_c^2 times the classical Fisher information, and the
Bayesian mean square error splits as delta2_c - local_error.  Rescaling by
the local slope gives the locally unbiased estimator est_best whose local
error saturates the classical Cramer-Rao bound 1/F for the chosen POVM.

simulate draws phases, samples an outcome from the exactly encoded state,
and applies est_best, using the fixed chunk partition of parallel.chunk_rngs
so runs are a deterministic function of (seed, shots).
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .core import DensityMatrix, GeneratorSpec, encode_phase
from .covariance import CovarianceMatrix, delta2_c, weights
from .dephasing import covariance_sqrt, dephase
from .errors import (
    DegenerateMeasurementError,
    NumericalConsistencyError,
    UninformativeMeasurementError,
)
from .fisher import Povm, qfi
from .parallel import chunk_rngs, map_ordered

PROB_FLOOR = 1e-12

_PROB_SUM_TOL = 1e-10
_NEGATIVE_PROB_TOL = -1e-12


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """One estimation scenario: probe state, generator, phase covariance,
    measurement, informed guess phi0, and a shift delta_phi of the true
    phase mean away from the guess (zero for a well-informed experiment)."""

    rho: DensityMatrix
    gen: GeneratorSpec
    cov: CovarianceMatrix
    povm: Povm
    phi0: float = 0.0
    delta_phi: float = 0.0

    def __post_init__(self):
        if self.rho.dim != self.gen.dim:
            raise ValueError("state and generator dimensions differ")
        if self.povm.dim != self.rho.dim:
            raise ValueError("POVM and state dimensions differ")
        if self.cov.n != self.gen.nsites:
            raise ValueError("covariance size does not match the site count")

    @cached_property
    def delta2(self) -> float:
        return delta2_c(self.cov)

    @cached_property
    def gamma(self) -> np.ndarray:
        return weights(self.cov).gamma

    @cached_property
    def averaged_state(self) -> DensityMatrix:
        """rho_bar at the informed guess: dephased, then rotated by phi0."""
        return encode_phase(dephase(self.rho, self.gen, self.cov), self.gen, self.phi0)


@dataclass(frozen=True, eq=False)
class EstimatorTable:
    """Per-outcome averaged probabilities and posterior-mean estimates.

    site_estimates has shape (outcomes, nsites); estimates is the gamma
    weighted combination; best is filled by best_estimator.  Outcomes whose
    averaged probability is at or below the floor are listed in excluded
    and pinned to the informed guess.
    """

    probs: np.ndarray
    site_estimates: np.ndarray
    estimates: np.ndarray
    phi0: float
    delta2: float
    gamma: np.ndarray
    excluded: tuple[int, ...]
    best: Optional[np.ndarray] = None

    def __post_init__(self):
        total = self.probs.sum()
        if abs(total - 1.0) > _PROB_SUM_TOL:
            raise NumericalConsistencyError(f"averaged probabilities sum to {total!r}")
        combo = self.phi0 + (self.site_estimates - self.phi0) @ self.gamma
        if np.abs(combo - self.estimates).max() > 1e-12:
            raise NumericalConsistencyError("estimates drifted from the weighted combination")

    @property
    def outcomes(self) -> int:
        return self.probs.size


@dataclass(frozen=True, eq=False)
class QbcrReport:
    """Bayesian mean square error against its quantum lower bound."""

    lhs: float
    rhs: float
    gap: float


@dataclass(frozen=True, eq=False)
class SimulationResult:
    shots: int
    seed: int
    phi0: float
    delta_phi: float
    empirical_mse_best: float
    mse_stderr: Optional[float]
    empirical_mean: float
    mean_stderr: Optional[float]
    phases: np.ndarray
    phi_c: np.ndarray
    outcomes: np.ndarray
    estimates: np.ndarray
    estimates_best: np.ndarray

    def per_shot_rows(self):
        """Yield per-shot log rows: index, sampled phases, outcome, estimate."""
        for i in range(self.shots):
            yield (i, *self.phases[i], int(self.outcomes[i]), float(self.estimates_best[i]))


def _effect_stack(povm: Povm) -> np.ndarray:
    """(dim*dim, outcomes) matrix with vec(Pi_x^T) columns, so that
    Tr(A Pi_x) = vec(A) . column_x."""
    return np.stack([e.T.ravel() for e in povm.effects], axis=1)


def averaged_probabilities(cfg: ExperimentConfig, phi: float) -> np.ndarray:
    """Outcome distribution of the dephased state rotated to phi."""
    state = encode_phase(dephase(cfg.rho, cfg.gen, cfg.cov), cfg.gen, phi)
    return cfg.povm.probabilities(state)


def bayes_estimators(cfg: ExperimentConfig, prob_floor: float = PROB_FLOOR) -> EstimatorTable:
    """Posterior-mean site estimators via the commutator-trace reduction."""
    rb = cfg.averaged_state.entries
    stack = _effect_stack(cfg.povm)
    probs = (rb.ravel() @ stack).real
    included = probs > prob_floor
    if not included.any():
        raise DegenerateMeasurementError("every outcome fell below the probability floor")

    table = cfg.gen.site_energy_table
    nsites = cfg.gen.nsites
    traces = np.empty((nsites, cfg.povm.outcomes))
    for j in range(nsites):
        sj = table[j]
        commutator = -1j * (sj[:, None] - sj[None, :]) * rb
        traces[j] = (commutator.ravel() @ stack).real

    ratios = np.zeros_like(traces)
    ratios[:, included] = traces[:, included] / probs[included]
    site_estimates = cfg.phi0 + (cfg.cov.entries @ ratios).T
    estimates = cfg.phi0 + (site_estimates - cfg.phi0) @ cfg.gamma
    return EstimatorTable(
        probs=probs,
        site_estimates=site_estimates,
        estimates=estimates,
        phi0=cfg.phi0,
        delta2=cfg.delta2,
        gamma=cfg.gamma,
        excluded=tuple(int(k) for k in np.flatnonzero(~included)),
    )


def local_error(cfg: ExperimentConfig, table: Optional[EstimatorTable] = None) -> float:
    """Second moment of the combined estimator around phi0 under the
    averaged distribution; equals delta2^2 times the classical Fisher
    information of the measurement."""
    if table is None:
        table = bayes_estimators(cfg)
    dev = table.estimates - table.phi0
    return float(np.sum(table.probs * dev * dev))


def best_estimator(cfg: ExperimentConfig) -> EstimatorTable:
    """Locally unbiased rescaling; its local error is 1/classical_fi."""
    table = bayes_estimators(cfg)
    le = local_error(cfg, table)
    if le <= 0.0:
        raise UninformativeMeasurementError("measurement has zero local information")
    best = table.phi0 + (table.estimates - table.phi0) * (table.delta2 / le)
    return dataclasses.replace(table, best=best)


def bayes_mse(cfg: ExperimentConfig) -> float:
    """Bayesian mean square error of the posterior-mean estimator:
    delta2_c minus the local error (an exact identity)."""
    table = bayes_estimators(cfg)
    return cfg.delta2 - local_error(cfg, table)


def qbcr_gap(cfg: ExperimentConfig) -> QbcrReport:
    """Gap of the Bayesian MSE above (1/delta2_c + F_rho)^{-1}; nonnegative
    up to rounding for every measurement."""
    lhs = bayes_mse(cfg)
    rhs = 1.0 / (1.0 / cfg.delta2 + qfi(cfg.rho, cfg.gen))
    return QbcrReport(lhs=lhs, rhs=rhs, gap=lhs - rhs)


def simulate(cfg: ExperimentConfig, shots: int, seed: int) -> SimulationResult:
    """Sample phases ~ N((phi0 + delta_phi) 1, C), draw one outcome per shot
    from the exactly encoded state, and apply the locally unbiased estimator.

    Outcome sampling inverts the per-shot CDF; probabilities are clamped at
    zero and renormalized when the worst negative stays above -1e-12, else a
    NumericalConsistencyError is raised.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    table = best_estimator(cfg)
    root = covariance_sqrt(cfg.cov)
    energy_table = cfg.gen.site_energy_table
    stack = _effect_stack(cfg.povm)
    rho = cfg.rho.entries
    mean = cfg.phi0 + cfg.delta_phi

    def run_chunk(job):
        rng, size = job
        phases = mean + rng.standard_normal((size, cfg.cov.n)) @ root
        w = np.exp(-1j * (phases @ energy_table))
        weighted = (w[:, :, None] * w.conj()[:, None, :]) * rho[None, :, :]
        probs = (weighted.reshape(size, -1) @ stack).real
        worst = probs.min()
        if worst < _NEGATIVE_PROB_TOL:
            raise NumericalConsistencyError(
                f"outcome probability {worst:.3e} below the clamping tolerance"
            )
        np.clip(probs, 0.0, None, out=probs)
        cdf = np.cumsum(probs, axis=1)
        cdf /= cdf[:, -1:]
        draws = rng.random(size)
        outcomes = (draws[:, None] > cdf).sum(axis=1)
        return phases, outcomes

    pieces = map_ordered(run_chunk, chunk_rngs(seed, shots))
    phases = np.concatenate([p for p, _ in pieces], axis=0)
    outcomes = np.concatenate([o for _, o in pieces], axis=0)

    estimates_best = table.best[outcomes]
    estimates = table.estimates[outcomes]
    squares = (estimates_best - cfg.phi0) ** 2
    if shots > 1:
        mse_stderr = float(squares.std(ddof=1) / np.sqrt(shots))
        mean_stderr = float(estimates_best.std(ddof=1) / np.sqrt(shots))
    else:
        mse_stderr = None
        mean_stderr = None
    return SimulationResult(
        shots=shots,
        seed=seed,
        phi0=cfg.phi0,
        delta_phi=cfg.delta_phi,
        empirical_mse_best=float(squares.mean()),
        mse_stderr=mse_stderr,
        empirical_mean=float(estimates_best.mean()),
        mean_stderr=mean_stderr,
        phases=phases,
        phi_c=phases @ cfg.gamma,
        outcomes=outcomes,
        estimates=estimates,
        estimates_best=estimates_best,
    )
