"""Quantum and classical Fisher information for diagonal-generator families.

Conventions: the symmetric logarithmic derivative L solves
L rho + rho L = -2i [H, rho], so for a pure state L = 2 drho.  In the
eigenbasis of rho, L_mn = 2 (drho)_mn / (lam_m + lam_n) on mode pairs whose
eigenvalue sum exceeds rank_tol = 1e-10 * lam_max; excluded pairs carry no
information and are set to zero.  The quantum Fisher information is
F = 2 sum |(drho)_mn|^2 / (lam_m + lam_n) over the same pairs, and a
projective measurement in any eigenbasis of L attains it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, GeneratorSpec, HermitianOperator
from .dephasing import derivative_state

RANK_TOL_FACTOR = 1e-10
PROB_FLOOR = 1e-12

_EFFECT_PSD_TOL = -1e-10
_COMPLETENESS_TOL = 1e-10
_DEGENERACY_TOL = 1e-8


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Povm:
    """A finite measurement: PSD effects summing to the identity."""

    effects: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.effects:
            raise ValueError("POVM needs at least one effect")
        cleaned = []
        dim = None
        for k, effect in enumerate(self.effects):
            a = np.array(effect, dtype=np.complex128)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ValueError(f"effect {k} is not a square matrix")
            if dim is None:
                dim = a.shape[0]
            elif a.shape[0] != dim:
                raise ValueError("effects have mismatched dimensions")
            dev = np.abs(a - a.conj().T).max()
            if dev > 1e-10:
                raise ValueError(f"effect {k} deviates from Hermiticity by {dev:.3e}")
            a = (a + a.conj().T) / 2
            if np.linalg.eigvalsh(a)[0] < _EFFECT_PSD_TOL:
                raise ValueError(f"effect {k} has a negative eigenvalue beyond tolerance")
            cleaned.append(_readonly(a))
        total = sum(cleaned)
        if np.abs(total - np.eye(dim)).max() > _COMPLETENESS_TOL:
            raise ValueError("effects do not sum to the identity within tolerance")
        object.__setattr__(self, "effects", tuple(cleaned))

    @classmethod
    def projective(cls, basis: np.ndarray) -> "Povm":
        """Rank-one projectors onto the columns of a unitary basis matrix."""
        b = np.asarray(basis, dtype=np.complex128)
        return cls(tuple(np.outer(b[:, k], b[:, k].conj()) for k in range(b.shape[1])))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    @property
    def outcomes(self) -> int:
        return len(self.effects)

    def probabilities(self, rho: DensityMatrix) -> np.ndarray:
        return np.array(
            [np.trace(rho.entries @ e).real for e in self.effects]
        )


def _eig_frame(rho: DensityMatrix, gen: GeneratorSpec):
    lam, vec = np.linalg.eigh(rho.entries)
    drho = derivative_state(rho, gen).entries
    mixed = vec.conj().T @ drho @ vec
    denom = lam[:, None] + lam[None, :]
    keep = denom > RANK_TOL_FACTOR * lam[-1]
    return lam, vec, mixed, denom, keep


def sld(rho: DensityMatrix, gen: GeneratorSpec) -> HermitianOperator:
    """Symmetric logarithmic derivative of the encoded family at rho."""
    _, vec, mixed, denom, keep = _eig_frame(rho, gen)
    safe = np.where(keep, denom, 1.0)
    frame = np.where(keep, 2.0 * mixed / safe, 0.0)
    out = vec @ frame @ vec.conj().T
    return HermitianOperator((out + out.conj().T) / 2)


def qfi(rho: DensityMatrix, gen: GeneratorSpec) -> float:
    """Quantum Fisher information of the encoded family at rho."""
    _, _, mixed, denom, keep = _eig_frame(rho, gen)
    safe = np.where(keep, denom, 1.0)
    terms = np.where(keep, np.abs(mixed) ** 2 / safe, 0.0)
    return float(2.0 * terms.sum())


def classical_fi(
    rho: DensityMatrix,
    gen: GeneratorSpec,
    povm: Povm,
    prob_floor: float = PROB_FLOOR,
) -> float:
    """Fisher information of the outcome distribution of `povm` on the
    encoded family at rho; outcomes at or below prob_floor are skipped."""
    if povm.dim != rho.dim:
        raise ValueError("POVM and state dimensions differ")
    drho = derivative_state(rho, gen).entries
    total = 0.0
    for effect in povm.effects:
        p = np.trace(rho.entries @ effect).real
        if p <= prob_floor:
            continue
        dp = np.trace(drho @ effect).real
        total += dp * dp / p
    return float(total)


def optimal_povm(rho: DensityMatrix, gen: GeneratorSpec) -> Povm:
    """Projective measurement in an eigenbasis of the SLD.

    Degenerate SLD eigenspaces are resolved by diagonalizing H restricted to
    the eigenspace; any remaining ties keep the ascending index order of the
    eigensolver, making the construction deterministic.
    """
    ell, vec = np.linalg.eigh(sld(rho, gen).entries)
    vec = vec.copy()
    scale = max(1.0, float(np.abs(ell).max()))
    energy = gen.energies
    start = 0
    for stop in range(1, len(ell) + 1):
        if stop < len(ell) and ell[stop] - ell[stop - 1] <= _DEGENERACY_TOL * scale:
            continue
        if stop - start > 1:
            block = vec[:, start:stop]
            restricted = block.conj().T @ (energy[:, None] * block)
            restricted = (restricted + restricted.conj().T) / 2
            _, rot = np.linalg.eigh(restricted)
            vec[:, start:stop] = block @ rot
        start = stop
    return Povm.projective(vec)
