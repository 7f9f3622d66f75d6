"""Moments, logarithmic potentials and balayage onto the unit circle.

Circle measures are sampled on the midpoint grid ``theta_j = 2 pi (j + 1/2) / G``,
which never hits ``theta = pi`` and so tolerates the integrable log
singularity of ``ln|1 + e^{i theta}|``. Densities are taken with respect to
normalized arc length ``d theta / 2 pi``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from .algebra import TracialState
from .errors import AtomOnOrOutsideCircle, DomainViolation, PreconditionViolated
from .fk import AtomicMeasure, brown_measure, det_via_brown, fk_det
from .matrix_core import as_cmatrix, spectral_radius

BOUNDARY_SPLIT = 1e-12


def midpoint_grid(G: int) -> np.ndarray:
    return 2.0 * np.pi * (np.arange(G) + 0.5) / G


@dataclass(frozen=True)
class CircleMeasure:
    """Density samples on the midpoint grid plus point masses on the circle."""

    density: np.ndarray
    pm_theta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    pm_mass: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        d = np.asarray(self.density, dtype=float).reshape(-1)
        th = np.asarray(self.pm_theta, dtype=float).reshape(-1)
        m = np.asarray(self.pm_mass, dtype=float).reshape(-1)
        if d.size == 0 or th.shape != m.shape:
            raise DomainViolation("empty density or mismatched point masses")
        if np.any(d < -1e-14) or np.any(m < 0):
            raise DomainViolation("circle measure must be non-negative")
        object.__setattr__(self, "density", d)
        object.__setattr__(self, "pm_theta", th)
        object.__setattr__(self, "pm_mass", m)

    @property
    def grid(self) -> int:
        return self.density.size

    @property
    def theta(self) -> np.ndarray:
        return midpoint_grid(self.grid)

    @property
    def total_mass(self) -> float:
        return float(self.density.mean() + self.pm_mass.sum())

    def plus_point_masses(self, theta, mass) -> "CircleMeasure":
        return CircleMeasure(self.density, np.concatenate([self.pm_theta, np.ravel(theta)]),
                             np.concatenate([self.pm_mass, np.ravel(mass)]))

    def to_json(self) -> str:
        pts = [{"mass": float(m), "theta": float(t)} for t, m in zip(self.pm_theta, self.pm_mass)]
        return json.dumps({"grid": self.grid, "density": self.density.tolist(), "point_masses": pts},
                          sort_keys=True)

    @classmethod
    def from_json(cls, text) -> "CircleMeasure":
        d = json.loads(text) if isinstance(text, (str, bytes)) else dict(text)
        dens = np.asarray(d["density"], dtype=float)
        if dens.size != int(d["grid"]):
            raise DomainViolation("density length does not match grid")
        pts = d.get("point_masses", [])
        return cls(dens, [p["theta"] for p in pts], [p["mass"] for p in pts])


Measure = Union[AtomicMeasure, CircleMeasure]


def uniform_circle(G: int = 4096) -> CircleMeasure:
    return CircleMeasure(np.ones(G))


def moments(mu: Measure, m_max: int) -> np.ndarray:
    """``int z^m d mu`` for ``m = 1..m_max``."""
    if isinstance(mu, AtomicMeasure):
        return mu.moments(m_max)
    m = np.arange(1, m_max + 1)
    dens = (mu.density[None, :] * np.exp(1j * m[:, None] * mu.theta[None, :])).mean(axis=1)
    pts = (mu.pm_mass[None, :] * np.exp(1j * m[:, None] * mu.pm_theta[None, :])).sum(axis=1)
    return dens + pts


def _log_abs(z: complex, pts: np.ndarray, w: np.ndarray) -> float:
    d = np.abs(z - pts)
    hit = (d == 0) & (w > 0)
    if np.any(hit):
        return -np.inf
    keep = w > 0
    return float(np.sum(w[keep] * np.log(d[keep])))


def log_potential(mu: Measure, z: complex) -> float:
    """``-int ln|z - y| d mu(y)``; ``+inf`` when ``z`` sits on an atom."""
    if isinstance(mu, AtomicMeasure):
        return -_log_abs(z, mu.atoms, mu.masses)
    e = np.exp(1j * mu.theta)
    dens = _log_abs(z, e, mu.density / mu.grid)
    pts = _log_abs(z, np.exp(1j * mu.pm_theta), mu.pm_mass)
    return -(dens + pts)


def poisson_kernel(a: complex, theta: np.ndarray) -> np.ndarray:
    """``(1 - |a|^2) / |e^{i theta} - a|^2``, normalized to mean 1."""
    return (1.0 - abs(a) ** 2) / np.abs(np.exp(1j * theta) - a) ** 2


def balayage_to_circle(mu0: AtomicMeasure, G: int = 4096) -> CircleMeasure:
    """Sweep atoms inside the open disk onto the circle with the Poisson kernel."""
    if mu0.atoms.size and np.max(np.abs(mu0.atoms)) >= 1.0:
        raise AtomOnOrOutsideCircle(f"atom of modulus {np.max(np.abs(mu0.atoms)):.17g}")
    th = midpoint_grid(G)
    dens = np.zeros(G)
    for a, w in zip(mu0.atoms, mu0.masses):
        dens += w * poisson_kernel(a, th)
    return CircleMeasure(dens)


def unit_log_integral(R: float, G: int = 8192) -> float:
    """Midpoint quadrature of ``(1/2pi) int ln(1 + R^2 + 2R cos theta)``; exact value ``max(0, 2 ln R)``."""
    if R < 0:
        raise DomainViolation("R must be non-negative")
    th = midpoint_grid(G)
    return float(np.mean(np.log(1.0 + R * R + 2.0 * R * np.cos(th))))


@dataclass(frozen=True)
class JensenReport:
    moment_residual: float
    log_integral: float
    det: float
    det_from_brown: float
    checks: Tuple[Tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(v for _, v in self.checks)

    def to_dict(self) -> dict:
        return {"moment_residual": self.moment_residual, "log_integral": self.log_integral,
                "det": self.det, "det_from_brown": self.det_from_brown,
                "checks": dict(self.checks), "ok": self.ok}


def jensen_via_potentials(tau: TracialState, x, m_max: int = 12, G: int = 4096,
                          moment_tol: float = 1e-9) -> JensenReport:
    """Balayage route to ``int ln|1 + y| d mu(y) >= 0`` for the Brown measure of ``x``.

    Requires ``r(x) <= 1`` and ``tau(x^m) = 0`` for ``m <= m_max``. Atoms with
    ``|a| >= 1 - 1e-12`` are kept as boundary mass, the rest are swept to the
    circle. Checks: the swept measure has vanishing moments, its log integral
    at ``-1`` is non-negative, and ``Delta(1 + x)`` matches the Brown integral.
    """
    x = as_cmatrix(x, square=True)
    r = spectral_radius(x)
    if r > 1.0 + 1e-9:
        raise PreconditionViolated(f"spectral radius {r:.6g} exceeds 1", r)
    p = np.eye(x.shape[0], dtype=np.complex128)
    for m in range(1, m_max + 1):
        p = p @ x
        t = abs(tau(p))
        if t > moment_tol:
            raise PreconditionViolated(f"tau(x^{m}) = {t:.3e} is not zero", m)
    mu = brown_measure(tau, x)
    live = mu.masses > 0
    atoms, masses = mu.atoms[live], mu.masses[live]
    bnd = np.abs(atoms) >= 1.0 - BOUNDARY_SPLIT
    nu = balayage_to_circle(AtomicMeasure(atoms[~bnd], masses[~bnd]), G)
    nu = nu.plus_point_masses(np.angle(atoms[bnd]), masses[bnd])
    mom = float(np.max(np.abs(moments(nu, m_max)), initial=0.0))
    ln_nu = -log_potential(nu, -1.0)
    brown = det_via_brown(tau, x).value
    det = fk_det(tau, np.eye(x.shape[0]) + x)
    checks = (
        ("moments_vanish", mom <= 1e-7),
        ("log_integral_nonnegative", ln_nu >= -1e-6),
        ("det_matches_brown", abs(det - brown) <= 1e-6 * max(1.0, brown)),
    )
    return JensenReport(mom, float(ln_nu), float(det), brown, checks)
