"""D-characters on nest algebras, conditional expectations and Jensen batteries.

For a nest subalgebra ``A`` with diagonal ``D = A cap A*`` the canonical
character ``Phi: A -> D`` zeroes every entry outside the diagonal cells.
The same compression on all of ``M`` is the trace-preserving conditional
expectation onto ``D``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .algebra import DiagonalSubalgebra, NestSubalgebra, TracialState, support_projection
from .errors import (DiskConditionViolated, NotFaithfulOnD, NotInSubalgebra, NotInvertible,
                     NotModuleMap, PreconditionViolated)
from .fk import fk_det
from .maps import LinearMapOnAlgebra, MatrixSubspace
from .matrix_core import as_cmatrix, matrix_to_dict, operator_norm, spectral_radius

MODULE_TOL = 1e-9


class DCharacter:
    """Compression ``Phi`` of a nest algebra onto its diagonal."""

    def __init__(self, nest: NestSubalgebra):
        self.A = nest
        self.D: DiagonalSubalgebra = nest.diagonal()

    @property
    def n(self) -> int:
        return self.A.n

    def __call__(self, a, check: bool = True) -> np.ndarray:
        return apply_character(self, a, check=check)

    def kernel_mask(self) -> np.ndarray:
        return self.A.mask & ~self.D.mask

    def random_kernel_element(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        a = self.A.random_element(rng, scale)
        return a - self(a)

    def as_linear_map(self) -> LinearMapOnAlgebra:
        return LinearMapOnAlgebra.from_function(self.A, lambda e: e * self.D.mask, self.D.basis(),
                                                name="nest compression")


def apply_character(phi: DCharacter, a, check: bool = True) -> np.ndarray:
    m = as_cmatrix(a, square=True)
    if check:
        mem = phi.A.membership(m)
        if not mem.member:
            raise NotInSubalgebra(f"entry of modulus {mem.diagnostic:.3e} below the nest pattern")
    return m * phi.D.mask


@dataclass
class Expectation:
    """Trace-preserving conditional expectation of ``M`` onto ``D``.

    With ``reduced=True`` the map is ``m -> Psi(z m z)``, supported on the
    range of the support projection ``z``.
    """

    tau: TracialState
    D: DiagonalSubalgebra
    z: np.ndarray
    reduced: bool = False

    def __call__(self, m) -> np.ndarray:
        x = self.tau.algebra.check(m)
        out = x * self.D.mask
        return out @ self.z if self.reduced else out


def construct_expectation(tau: TracialState, D: DiagonalSubalgebra, reduce: bool = False) -> Expectation:
    """Build ``Psi: M -> D``.

    Raises
    ------
    NotFaithfulOnD
        If some cell of ``D`` sits in a zero-weight block and ``reduce`` is False.
    """
    red = support_projection(tau)
    if not tau.faithful and not reduce:
        dead = [k for k, c in enumerate(tau.weights) if c == 0]
        raise NotFaithfulOnD(f"blocks {dead} carry zero weight, so tau is not faithful on D")
    return Expectation(tau, D, red.z, reduced=not tau.faithful)


def expectation_uniqueness(tau: TracialState, D: DiagonalSubalgebra, samples: int = 100,
                           rng: Optional[np.random.Generator] = None):
    """Solve for every unital, trace-preserving, D-bimodule idempotent ``M -> D``.

    Returns
    -------
    null_dim : int
        Dimension of the solution set (0 means unique).
    deviation : float
        Max ``||Psi'(m) - Psi(m)||`` for the least-squares solution ``Psi'``
        over random ``m``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    alg = tau.algebra
    mask_m = alg.pattern()
    m_basis = MatrixSubspace(_units(mask_m))
    d_basis = D.basis()
    k, m = len(d_basis), m_basis.dim
    m_units = m_basis.basis()

    def psi(x_coef, y):
        c = y[mask_m]
        return np.tensordot(x_coef @ c, d_basis, axes=1)

    def residuals(x_coef):
        out = []
        for d in d_basis:
            out.append((psi(x_coef, d) - d).ravel())
        for g in d_basis:
            for e in m_units:
                pe = psi(x_coef, e)
                out.append((psi(x_coef, g @ e) - g @ pe).ravel())
                out.append((psi(x_coef, e @ g) - pe @ g).ravel())
        out.append(np.array([tau(psi(x_coef, e)) - tau(e) for e in m_units]))
        return np.concatenate(out)

    zero = np.zeros((k, m), dtype=np.complex128)
    b = -residuals(zero)
    cols = []
    for i in range(k):
        for j in range(m):
            u = zero.copy()
            u[i, j] = 1.0
            cols.append(residuals(u) + b)
    L = np.stack(cols, axis=1)
    sol, *_ = np.linalg.lstsq(L, b, rcond=None)
    rank = np.linalg.matrix_rank(L, tol=1e-8 * max(1.0, np.abs(L).max()))
    x_coef = sol.reshape(k, m)
    dev = 0.0
    for _ in range(samples):
        y = alg.random_element(rng)
        dev = max(dev, operator_norm(psi(x_coef, y) - y * D.mask))
    return k * m - rank, dev


def _units(mask: np.ndarray) -> np.ndarray:
    rows, cols = np.nonzero(mask)
    out = np.zeros((len(rows),) + mask.shape, dtype=np.complex128)
    out[np.arange(len(rows)), rows, cols] = 1.0
    return out


def jensen_check(tau: TracialState, phi: DCharacter, f):
    """``(Delta(Phi(f)), Delta(f))`` for ``f`` in ``A``."""
    d = phi(f)
    return fk_det(tau, d), fk_det(tau, as_cmatrix(f))


def ball_jensen_check(tau: TracialState, phi: DCharacter, x, tol: float = 1e-10) -> float:
    """``Delta(1 + x)`` for ``x`` in ``ker Phi`` with spectral radius at most 1."""
    m = as_cmatrix(x, square=True)
    mem = phi.A.membership(m)
    if not mem.member:
        raise PreconditionViolated("x is not in A", mem.diagnostic)
    scale = max(1.0, operator_norm(m))
    leak = operator_norm(phi(m))
    if leak > tol * scale:
        raise PreconditionViolated(f"||Phi(x)|| = {leak:.3e} is not zero", leak)
    r = spectral_radius(m)
    if r > 1.0 + tol:
        raise PreconditionViolated(f"spectral radius {r:.3e} exceeds 1", r)
    return fk_det(tau, np.eye(phi.n) + m)


def jensen_equality_disk(tau: TracialState, phi: DCharacter, x, tol: float = 1e-10):
    """``(|Delta(Phi(x))|, Delta(x))`` under ``||Phi(x)^{-1} x - 1|| <= 1``."""
    m = as_cmatrix(x, square=True)
    d = phi(m)
    s = np.linalg.svd(d, compute_uv=False)
    if s[-1] <= 1e-12 * max(s[0], 1e-300):
        raise NotInvertible("Phi(x) is not invertible in D")
    k = np.linalg.solve(d, m) - np.eye(phi.n)
    q = operator_norm(k)
    if q > 1.0 + tol:
        raise DiskConditionViolated(f"||Phi(x)^-1 x - 1|| = {q:.3e} exceeds 1", q)
    return abs(fk_det(tau, d)), fk_det(tau, m)


def random_disk_instance(phi: DCharacter, rng: np.random.Generator, spread: float = 1.0) -> np.ndarray:
    """``x = d (1 + k)`` with ``d = exp(h)``, ``h`` in ``D`` and ``k`` in ``ker Phi``, ``||k|| <= 1``."""
    h = spread * phi.D.random_element(rng)
    d = expm(h)
    k = phi.random_kernel_element(rng)
    nk = operator_norm(k)
    if nk > 0:
        k = k * (rng.uniform(0.05, 1.0) / nk)
    return d @ (np.eye(phi.n) + k)


# verdicts -----------------------------------------------------------------

FALSIFIED = "FALSIFIED"
NO_VIOLATION = "NO_VIOLATION_FOUND"


@dataclass
class Verdict:
    verdict: str
    trials: int
    seed: int
    witness: Optional[np.ndarray] = None
    details: dict = field(default_factory=dict)

    @property
    def falsified(self) -> bool:
        return self.verdict == FALSIFIED

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "trials": self.trials, "seed": self.seed}
        if self.witness is not None:
            out["witness"] = matrix_to_dict(self.witness)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_module_map(T: LinearMapOnAlgebra, tol: float) -> None:
    u = T.unital_residual()
    if u > tol:
        raise NotModuleMap(f"T(1) differs from 1 by {u:.3e}")
    b = T.bimodule_residual()
    if b > tol:
        raise NotModuleMap(f"D-bimodule residual {b:.3e}")
    r = T.range_residual()
    if r > tol:
        raise NotModuleMap(f"T leaves D by {r:.3e}")


def bis_falsifier(tau: TracialState, T: LinearMapOnAlgebra, trials: int = 1000, delta: float = 0.5,
                  seed: int = 0, tol: float = MODULE_TOL) -> Verdict:
    """Search ``ker T`` for ``||x|| < delta`` with ``Delta(1 + x) < 1``.

    A unital D-bimodule map satisfies the ball-Jensen inequality only if it
    is a trace-preserving homomorphism, so any witness refutes that.
    """
    _check_module_map(T, tol)
    rng = np.random.default_rng(seed)
    dom = T.domain
    one = np.eye(T.n)
    tp = T.trace_preservation_residual(tau)
    worst = np.inf
    for t in range(trials):
        a = dom.random_element(rng)
        x = a - T(a, check=False)
        nx = operator_norm(x)
        if nx <= 1e-14:
            continue
        x = x * (delta * rng.uniform(0.02, 0.999) / nx)
        val = fk_det(tau, one + x)
        worst = min(worst, val)
        if val < 1.0 - 1e-9:
            return Verdict(FALSIFIED, t + 1, seed, x,
                           {"det": val, "tau_preservation_residual": tp})
    return Verdict(NO_VIOLATION, trials, seed, None,
                   {"min_det": float(worst), "tau_preservation_residual": tp})


MONOMIALS = ("1", "s", "t", "ss", "st", "ts", "tt")


def eval_quadratic(coef: Sequence[complex], s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Noncommutative quadratic ``sum c_w w(s, t)`` over ``MONOMIALS``."""
    one = np.eye(s.shape[0])
    terms = (one, s, t, s @ s, s @ t, t @ s, t @ t)
    return sum(c * w for c, w in zip(coef, terms))


def random_quadratic(rng: np.random.Generator) -> np.ndarray:
    """Coefficients in the unit complex disk, random support and log-uniform sizes."""
    while True:
        keep = rng.random(len(MONOMIALS)) < 0.5
        if keep.any():
            break
    r = np.sqrt(rng.random(len(MONOMIALS))) * 10.0 ** rng.uniform(-3, 0, len(MONOMIALS))
    ph = np.exp(2j * np.pi * rng.random(len(MONOMIALS)))
    return np.where(keep, r * ph, 0.0)


def quadratic_l2_check(tau: TracialState, T: LinearMapOnAlgebra, trials: int = 1000, seed: int = 0,
                       tol: float = MODULE_TOL) -> Verdict:
    """Search for ``||p(d, T(a))||_2 > ||p(d, a)||_2`` over quadratics ``p``."""
    _check_module_map(T, tol)
    if T.d_basis is None:
        raise NotModuleMap("range algebra basis not supplied")
    rng = np.random.default_rng(seed)
    dspace = MatrixSubspace(T.d_basis)
    worst = -np.inf
    for t in range(trials):
        coef = random_quadratic(rng)
        d = dspace.random_element(rng, scale=rng.uniform(0.1, 2.0))
        a = T.domain.random_element(rng, scale=rng.uniform(0.1, 2.0))
        if rng.random() < 0.5:
            a = a - T(a, check=False)
        lhs = tau.l2_norm(eval_quadratic(coef, d, T(a, check=False)))
        rhs = tau.l2_norm(eval_quadratic(coef, d, a))
        gap = lhs - rhs
        worst = max(worst, gap)
        if gap > 1e-9 * max(1.0, rhs):
            return Verdict(FALSIFIED, t + 1, seed, a, {"gap": gap, "coefficients": coef.tolist(),
                                                       "d": d})
    return Verdict(NO_VIOLATION, trials, seed, None, {"max_gap": float(worst)})


# constructed module maps ----------------------------------------------------

def scalar_basis(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)[None]


def trace_average_map(tau: TracialState, nest: NestSubalgebra) -> LinearMapOnAlgebra:
    """``T(a) = tau(a) 1``: unital, trace preserving, not multiplicative."""
    n = nest.n
    return LinearMapOnAlgebra.from_function(nest, lambda e: tau(e) * np.eye(n), scalar_basis(n),
                                            name="trace average")


def weighted_diagonal_map(nest: NestSubalgebra, weights: Sequence[float]) -> LinearMapOnAlgebra:
    """``T(a) = (sum w_i a_ii) 1`` with ``sum w_i = 1``; trace preserving only for uniform weights."""
    w = np.asarray(weights, dtype=float)
    n = nest.n
    return LinearMapOnAlgebra.from_function(nest, lambda e: np.sum(w * np.diag(e)) * np.eye(n),
                                            scalar_basis(n), name="weighted diagonal")


def unipotent_algebra(n: int) -> MatrixSubspace:
    """``C 1 + strictly upper triangular`` in ``M_n``; its diagonal ``A cap A*`` is ``C 1``."""
    basis = [np.eye(n, dtype=np.complex128)]
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=np.complex128)
            e[i, j] = 1.0
            basis.append(e)
    return MatrixSubspace(np.array(basis))


def perturbed_unipotent_map(n: int, kappa: float, rng: np.random.Generator) -> LinearMapOnAlgebra:
    """``T(l 1 + N) = (l + kappa f(N)) 1`` for a random functional ``f``.

    The unperturbed map (``kappa = 0``) is the multiplicative character on
    ``C 1 + strictly upper triangular``.
    """
    A = unipotent_algebra(n)
    f = rng.standard_normal(A.dim - 1) + 1j * rng.standard_normal(A.dim - 1)
    f /= np.linalg.norm(f)
    images = [np.eye(n, dtype=np.complex128)] + [kappa * f[i] * np.eye(n) for i in range(A.dim - 1)]
    return LinearMapOnAlgebra(A, np.array(images), scalar_basis(n), name="perturbed unipotent")
