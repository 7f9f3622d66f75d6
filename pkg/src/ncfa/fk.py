"""Fuglede-Kadison determinants and Brown measures of block matrices.

For ``M = sum M_{n_k}`` with weights ``c_k`` the determinant is

    Delta_tau(a) = prod_{c_k > 0} |det a_k|^{c_k / n_k},

computed from singular values so that support reduction, singular
inputs and the epsilon-regularized limit share one code path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .algebra import TracialState
from .errors import DomainViolation, NotInvertible
from .matrix_core import general_eigenvalues

DEFAULT_EPS_SCHEDULE = tuple(10.0 ** (-k) for k in range(1, 10))
RANK_TOL = 1e-14


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite positive measure ``sum m_i delta_{z_i}`` on the plane."""

    atoms: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=np.complex128).reshape(-1)
        masses = np.asarray(self.masses, dtype=float).reshape(-1)
        if atoms.shape != masses.shape:
            raise DomainViolation("atoms and masses differ in length")
        if np.any(masses < 0) or masses.sum() > 1 + 1e-12:
            raise DomainViolation("masses must be non-negative with total at most 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def moments(self, m_max: int) -> np.ndarray:
        m = np.arange(1, m_max + 1)
        return (self.masses[None, :] * self.atoms[None, :] ** m[:, None]).sum(axis=1)

    def restrict(self, keep: np.ndarray) -> "AtomicMeasure":
        return AtomicMeasure(self.atoms[keep], self.masses[keep])

    def to_json(self) -> str:
        return json.dumps({"atoms_re": self.atoms.real.tolist(), "atoms_im": self.atoms.imag.tolist(),
                           "masses": self.masses.tolist()})

    @classmethod
    def from_json(cls, text) -> "AtomicMeasure":
        d = json.loads(text) if isinstance(text, (str, bytes)) else dict(text)
        atoms = np.asarray(d["atoms_re"], float) + 1j * np.asarray(d["atoms_im"], float)
        return cls(atoms, np.asarray(d["masses"], float))


@dataclass(frozen=True)
class FKResult:
    """Determinant value plus the epsilon tail used when ``|a|`` is singular.

    ``tail`` holds ``(eps, exp tau(ln(|a| + eps)))`` pairs; it is empty for
    the invertible case.
    """

    value: float
    invertible: bool
    tail: Tuple[Tuple[float, float], ...] = ()

    @property
    def last_two(self) -> Tuple[Tuple[float, float], ...]:
        return self.tail[-2:]


def _weighted_singular_values(tau: TracialState, a) -> Tuple[np.ndarray, np.ndarray, float]:
    blocks = tau.algebra.blocks(a)
    s_all, w_all = [], []
    smax = 0.0
    for k in tau.supported():
        s = np.linalg.svd(blocks[k], compute_uv=False)
        s_all.append(s)
        w_all.append(np.full(s.shape, tau.weights[k] / tau.algebra.block_sizes[k]))
        smax = max(smax, float(s[0]) if s.size else 0.0)
    return np.concatenate(s_all), np.concatenate(w_all), smax


def fk_det_detail(tau: TracialState, a, eps_schedule: Optional[Sequence[float]] = None) -> FKResult:
    s, w, smax = _weighted_singular_values(tau, a)
    cut = RANK_TOL * max(smax, 1e-300) * max(tau.algebra.block_sizes)
    if smax > 0 and np.all(s > cut):
        return FKResult(float(np.exp(np.sum(w * np.log(s)))), True)
    schedule = DEFAULT_EPS_SCHEDULE if eps_schedule is None else tuple(eps_schedule)
    sz = np.where(s > cut, s, 0.0)
    tail = tuple((float(e), float(np.exp(np.sum(w * np.log(sz + e))))) for e in schedule)
    return FKResult(0.0, False, tail)


def fk_det(tau: TracialState, a, eps_schedule: Optional[Sequence[float]] = None) -> float:
    """Fuglede-Kadison determinant ``Delta_tau(a)``; 0 for singular ``|a|`` on the support."""
    return fk_det_detail(tau, a, eps_schedule).value


def log_fk_det(tau: TracialState, a) -> float:
    """``tau(ln |a|)``, ``-inf`` for singular inputs."""
    s, w, smax = _weighted_singular_values(tau, a)
    cut = RANK_TOL * max(smax, 1e-300) * max(tau.algebra.block_sizes)
    if smax == 0 or np.any(s <= cut):
        return -np.inf
    return float(np.sum(w * np.log(s)))


def brown_measure(tau: TracialState, a, tol: float = 1e-10) -> AtomicMeasure:
    """Weighted eigenvalue counting measure over the supported blocks."""
    blocks = tau.algebra.blocks(a)
    atoms: List[np.ndarray] = []
    masses: List[np.ndarray] = []
    for k in tau.supported():
        ev = general_eigenvalues(blocks[k], tol=tol)
        atoms.append(ev)
        masses.append(np.full(ev.shape, tau.weights[k] / tau.algebra.block_sizes[k]))
    if not atoms:
        return AtomicMeasure(np.zeros(0), np.zeros(0))
    return AtomicMeasure(np.concatenate(atoms), np.concatenate(masses))


@dataclass(frozen=True)
class BrownDet:
    value: float
    log_singularity: bool


def det_via_brown(tau: TracialState, a, shift: complex = 1.0, tol: float = 1e-10) -> BrownDet:
    """``exp(int ln|shift + z| dmu(z))`` over the Brown measure of ``a``."""
    mu = brown_measure(tau, a)
    d = np.abs(shift + mu.atoms)
    hit = (d <= tol) & (mu.masses > 0)
    if np.any(hit):
        return BrownDet(0.0, True)
    return BrownDet(float(np.exp(np.sum(mu.masses * np.log(d)))), False)


def _neville_at_zero(x: np.ndarray, y: np.ndarray) -> float:
    """Polynomial interpolant through ``(x_i, y_i)`` evaluated at 0."""
    p = list(map(float, y))
    n = len(x)
    for lev in range(1, n):
        for i in range(n - lev):
            p[i] = (x[i + lev] * p[i] - x[i] * p[i + 1]) / (x[i + lev] - x[i])
    return p[0]


def power_limit_det(tau: TracialState, a, eps_schedule: Optional[Sequence[float]] = None,
                    return_iterates: bool = False):
    """Limit of ``tau(|a|^eps)^{1/eps}`` as ``eps -> 0+``.

    Works with ``L(eps) = ln tau(|a|^eps) / eps`` evaluated through
    ``expm1``/``log1p`` and Richardson-extrapolates the last three
    schedule points to ``eps = 0``.
    """
    s, w, smax = _weighted_singular_values(tau, a)
    cut = RANK_TOL * max(smax, 1e-300) * max(tau.algebra.block_sizes)
    if smax == 0 or np.any(s <= cut):
        raise NotInvertible("|a| is singular on the support of tau")
    schedule = np.asarray(DEFAULT_EPS_SCHEDULE if eps_schedule is None else eps_schedule, dtype=float)
    if schedule.size < 3:
        raise DomainViolation("schedule needs at least three points")
    ls = np.log(s)
    # supported weights sum to 1, so tau(|a|^e) = 1 + sum w (s^e - 1)
    it = np.array([np.log1p(np.sum(w * np.expm1(e * ls))) / e for e in schedule])
    value = float(np.exp(_neville_at_zero(schedule[-3:], it[-3:])))
    if return_iterates:
        return value, np.exp(it)
    return value
