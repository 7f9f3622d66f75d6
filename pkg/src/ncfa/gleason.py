"""Moebius maps of the operator ball, the hyperbolic metric and Gleason-part tests.

Characters live on a *domain*: either a subalgebra of ``M_n`` or the disk
algebra truncated to polynomials of degree at most ``N``. Elements are
complex coordinate vectors, and a character is stored through the images
of the domain basis, shape ``(dim, k, k)``.

Norm maximizations return lower bounds. For the function domain the sup
norm of the input is replaced by a certified upper bound, so ratios
``||Phi(a) - Psi(a)|| / ||a||`` stay valid lower bounds.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.linalg import null_space

from .errors import DomainMismatch, NotStrictContraction, SingularResolvent
from .maps import LinearMapOnAlgebra, MatrixSubspace, as_subspace
from .matrix_core import adjoint, as_cmatrix, func_calc, operator_norm

MARGIN = 1e-6


# Moebius geometry ---------------------------------------------------------

def _ball(x, margin: float) -> np.ndarray:
    m = as_cmatrix(x)
    s = np.linalg.svd(m, compute_uv=False)
    if s.size and 1.0 - s[0] ** 2 < margin ** 2:
        raise NotStrictContraction(f"||x|| = {s[0]:.15f} is not a strict contraction")
    return m


def _inv_sqrt_defect(x: np.ndarray, left: bool, power: float) -> np.ndarray:
    g = x @ adjoint(x) if left else adjoint(x) @ x
    return func_calc(lambda t: (1.0 - t) ** power, g, domain=(-1e-15, 1.0), open_left=False)


def mobius_map(x, y, margin: float = MARGIN) -> np.ndarray:
    """``T_x(y) = (1 - xx*)^{-1/2} (x + y) (1 + x*y)^{-1} (1 - x*x)^{1/2}``."""
    x, y = _ball(x, margin), _ball(y, margin)
    if x.shape != y.shape:
        raise DomainMismatch("x and y differ in shape")
    if x.shape == (1, 1):
        a, b = x[0, 0], y[0, 0]
        den = 1.0 + np.conj(a) * b
        if abs(den) < 1e-14:
            raise SingularResolvent("1 + x*y is singular")
        # scalar defect factors cancel up to phase 1
        return np.array([[(a + b) / den]])
    n = x.shape[1]
    res = np.eye(n) + adjoint(x) @ y
    if np.linalg.svd(res, compute_uv=False)[-1] < 1e-14:
        raise SingularResolvent("1 + x*y is singular")
    left = _inv_sqrt_defect(x, True, -0.5)
    right = _inv_sqrt_defect(x, False, 0.5)
    return left @ np.linalg.solve(res.T, (x + y).T).T @ right


def hyperbolic_distance(x, y, margin: float = MARGIN) -> float:
    """``rho(x, y) = atanh ||T_{-x}(y)||``."""
    x, y = _ball(x, margin), _ball(y, margin)
    t = operator_norm(mobius_map(-x, y, margin))
    return float(np.arctanh(min(t, 1.0 - 1e-16)))


def scalar_rho(a: complex, b: complex) -> float:
    """Hyperbolic distance in the unit disk."""
    t = abs(a - b) / abs(1.0 - np.conj(a) * b)
    return float(np.arctanh(min(t, 1.0 - 1e-16)))


@dataclass
class HoloMap:
    """Holomorphic self-map of the open ball built from generator steps."""

    steps: list
    pure_mobius: bool

    def __call__(self, y) -> np.ndarray:
        for kind, p in self.steps:
            if kind == "mobius":
                y = mobius_map(p, y)
            elif kind == "left":
                y = p @ y
            elif kind == "right":
                y = y @ p
            else:
                y = p * y
        return y


def random_holomorphic_map(n: int, rng: np.random.Generator, depth: int = 3,
                           mobius_only: bool = False) -> HoloMap:
    """Composition of Moebius maps, multiplications by contractions and scalings."""
    steps = []
    for _ in range(depth):
        kind = "mobius" if mobius_only else rng.choice(["mobius", "left", "right", "scalar"])
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        g = g / operator_norm(g)
        if kind == "mobius":
            steps.append(("mobius", g * rng.uniform(0.0, 0.9)))
        elif kind in ("left", "right"):
            steps.append((kind, g * rng.uniform(0.2, 1.0)))
        else:
            steps.append(("scalar", rng.uniform(0.2, 1.0) * np.exp(2j * np.pi * rng.random())))
    return HoloMap(steps, all(k == "mobius" for k, _ in steps))


def schwarz_pick_margin(h: Callable, x, y) -> float:
    """``rho(x, y) - rho(h(x), h(y))``; non-negative for holomorphic self-maps."""
    return hyperbolic_distance(x, y) - hyperbolic_distance(h(x), h(y))


def random_strict_contraction(n: int, rng: np.random.Generator, max_norm: float = 0.95) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return g * (rng.uniform(0.0, max_norm) / operator_norm(g))


def harrt_divergence(S_seq: Sequence, T_seq: Sequence) -> np.ndarray:
    """``rho(S_n, T_n)`` along two sequences of strict contractions."""
    return np.array([hyperbolic_distance(s, t) for s, t in zip(S_seq, T_seq)])


@dataclass(frozen=True)
class BoundaryEstimate:
    lhs: float          # 1 - ||T_x(y)||^2
    stated_rhs: float   # (1 + |x|^2) / (1 - |x||y|)^2 * (1 - |y|)^2
    corrected_rhs: float  # same with (1 - |y|^2)

    @property
    def stated_holds(self) -> bool:
        return self.lhs <= self.stated_rhs + 1e-9

    @property
    def corrected_holds(self) -> bool:
        return self.lhs <= self.corrected_rhs + 1e-9


def boundary_estimate_check(x, y) -> BoundaryEstimate:
    """Evaluate the boundary estimate for ``1 - ||T_x(y)||^2``.

    The displayed form with ``(1 - ||y||)^2`` already fails at ``x = 0``;
    the argument behind it yields the factor ``1 - ||y||^2``.
    """
    x, y = _ball(x, MARGIN), _ball(y, MARGIN)
    nx, ny = operator_norm(x), operator_norm(y)
    lhs = 1.0 - operator_norm(mobius_map(x, y)) ** 2
    k = (1.0 + nx ** 2) / (1.0 - nx * ny) ** 2
    return BoundaryEstimate(lhs, k * (1.0 - ny) ** 2, k * (1.0 - ny ** 2))


# domains and characters -----------------------------------------------------

class MatrixDomain:
    """Subalgebra of ``M_n`` with operator norm."""

    def __init__(self, space):
        self.space = as_subspace(space)
        self.dim = self.space.dim
        self._one = self.space.coords(np.eye(self.space.n))

    def element(self, c) -> np.ndarray:
        return self.space.element(c)

    def norm(self, c) -> float:
        return operator_norm(self.element(c))

    def fast_norms(self, X) -> np.ndarray:
        return _opnorms(np.tensordot(X, self.space.basis(), axes=1))

    def one(self) -> np.ndarray:
        return self._one.copy()

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)

    def starts(self) -> List[np.ndarray]:
        eye = np.eye(self.dim, dtype=np.complex128)
        out = list(eye)
        if self.dim > 12:
            return out
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                out.append(eye[i] - eye[j])
        return out

    def real_positive_samples(self, rng: np.random.Generator, count: int) -> List[np.ndarray]:
        """Random ``a`` shifted so ``a + a* >= 0``, plus boundary PSD elements of ``A cap A*``."""
        out = []
        herm = self._hermitian_basis()
        for t in range(count):
            if herm is not None and t % 2 == 1:
                c = herm @ rng.standard_normal(herm.shape[1])
            else:
                c = self.random(rng)
            a = self.element(c)
            re = 0.5 * (a + adjoint(a))
            s = -np.linalg.eigvalsh(re)[0]
            out.append(c + s * self._one)
        return out

    def _hermitian_basis(self) -> Optional[np.ndarray]:
        # real-linear solve of a = a* in coordinates
        b = self.space.basis()
        cols = []
        for e in b:
            cols.append(np.concatenate([(e - adjoint(e)).real.ravel(), (e - adjoint(e)).imag.ravel()]))
        for e in b:
            ie = 1j * e
            cols.append(np.concatenate([(ie - adjoint(ie)).real.ravel(), (ie - adjoint(ie)).imag.ravel()]))
        null = null_space(np.stack(cols, axis=1))
        if null.shape[1] == 0:
            return None
        return null[: self.dim] + 1j * null[self.dim:]

    def same_as(self, other) -> bool:
        return isinstance(other, MatrixDomain) and (self is other or (
            self.space.basis().shape == other.space.basis().shape
            and np.allclose(self.space.basis(), other.space.basis())))


class FunctionDomain:
    """Disk-algebra polynomials ``sum_{k<=N} c_k z^k`` with the sup norm on the circle.

    ``norm`` is certified: for degree ``N`` and ``G`` grid points,
    ``||p||_inf <= max_grid |p| / cos(pi N / G)``. This follows from the
    van der Corput-Schaake inequality, applied to ``Re(e^{-i phi} p)`` at its
    maximum. Real-part minima use the cruder Bernstein slack ``pi N / G``.
    """

    def __init__(self, N: int = 16, grid: int = 4096, ascent_grid: Optional[int] = None):
        self.N = int(N)
        self.dim = self.N + 1
        self.grid = int(grid)
        self.ascent_grid = int(ascent_grid or max(32 * self.N, 256))
        if np.pi * self.N / self.grid >= 0.5:
            raise DomainMismatch("grid too coarse for the polynomial degree")

    def values(self, c, grid: Optional[int] = None) -> np.ndarray:
        g = self.grid if grid is None else grid
        return np.fft.ifft(np.asarray(c), n=g) * g

    def norm(self, c) -> float:
        return float(np.abs(self.values(c)).max() / np.cos(np.pi * self.N / self.grid))

    def fast_norms(self, X) -> np.ndarray:
        return np.abs(np.fft.ifft(X, n=self.ascent_grid, axis=1)).max(axis=1) * self.ascent_grid

    def one(self) -> np.ndarray:
        e = np.zeros(self.dim, dtype=np.complex128)
        e[0] = 1.0
        return e

    def random(self, rng: np.random.Generator) -> np.ndarray:
        decay = 1.0 / (1.0 + np.arange(self.dim))
        return decay * (rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim))

    def starts(self) -> List[np.ndarray]:
        eye = np.eye(self.dim, dtype=np.complex128)
        return [eye[0], eye[1], eye[-1], eye[0] - eye[1]]

    def fejer_bump(self, theta0: float) -> np.ndarray:
        """Analytic polynomial whose real part is the Fejer kernel centred at ``theta0``."""
        k = np.arange(1, self.dim)
        c = np.zeros(self.dim, dtype=np.complex128)
        c[0] = 1.0
        c[1:] = 2.0 * (1.0 - k / (self.N + 1.0)) * np.exp(-1j * k * theta0)
        return c

    def real_positive_samples(self, rng: np.random.Generator, count: int) -> List[np.ndarray]:
        """Shifted random polynomials and Fejer bumps at random angles."""
        out = []
        slack = np.pi * self.N / self.grid
        for t in range(count):
            if t % 2 == 0:
                out.append(self.fejer_bump(2.0 * np.pi * rng.random()))
            else:
                c = self.random(rng)
                v = self.values(c)
                bound = np.abs(v).max() / (1.0 - slack)
                s = -v.real.min() + 2.0 * slack * bound
                out.append(c + s * self.one())
        return out

    def same_as(self, other) -> bool:
        return isinstance(other, FunctionDomain) and other.N == self.N


@dataclass
class Character:
    """Linear unital map on a domain given by basis images ``(dim, k, k)``."""

    domain: object
    images: np.ndarray
    name: str = ""

    def __post_init__(self):
        im = np.asarray(self.images, dtype=np.complex128)
        if im.ndim == 1:
            im = im[:, None, None]
        self.images = im

    def __call__(self, c) -> np.ndarray:
        return np.tensordot(np.asarray(c), self.images, axes=1)

    def batch(self, X) -> np.ndarray:
        return np.tensordot(np.asarray(X), self.images, axes=1)

    @property
    def k(self) -> int:
        return self.images.shape[1]


def character_from_map(T: LinearMapOnAlgebra, domain: Optional[MatrixDomain] = None) -> Character:
    dom = MatrixDomain(T.domain) if domain is None else domain
    # re-express the images in the domain's own coordinates
    imgs = np.array([T(e, check=False) for e in dom.space.basis()])
    return Character(dom, imgs, T.name)


def corner_characters(n: int = 2):
    """Diagonal-entry evaluations ``a -> a_ii`` on upper triangular ``n x n``."""
    from .algebra import DirectSumAlgebra, NestSubalgebra
    nest = NestSubalgebra(DirectSumAlgebra((n,)))
    dom = MatrixDomain(MatrixSubspace(nest.basis()))
    b = dom.space.basis()
    return dom, [Character(dom, b[:, i, i], f"corner {i + 1}") for i in range(n)]


def evaluation_character(domain: FunctionDomain, lam: complex) -> Character:
    """``p -> p(lam)``; equals integration against the Poisson weight at ``lam``."""
    return Character(domain, np.asarray(lam, dtype=np.complex128) ** np.arange(domain.dim), f"eval {lam}")


def _check_pair(phi: Character, psi: Character):
    if not phi.domain.same_as(psi.domain):
        raise DomainMismatch("characters act on different domains")
    return phi.domain


# ascent ---------------------------------------------------------------------

def _opnorms(m: np.ndarray) -> np.ndarray:
    if m.shape[1:] == (1, 1):
        return np.abs(m[:, 0, 0])
    return np.linalg.svd(m, compute_uv=False)[:, 0]


_ETAS = 2.0 ** np.arange(1, -12, -1)


def _ascend(objb: Callable[[np.ndarray], np.ndarray], starts: np.ndarray, steps: int,
            h: float = 1e-7) -> tuple:
    """Batched finite-difference ascent on the unit sphere of coordinates.

    ``objb`` maps rows of complex coordinates to objective values. All
    starts move together; each step forms a forward-difference gradient
    and takes the best of a fixed ladder of step sizes, scaled per start.
    A start stops once no step size improves it.
    """
    X = np.asarray(starts, dtype=np.complex128)
    X = X[np.linalg.norm(X, axis=1) > 0]
    X = X / np.linalg.norm(X, axis=1, keepdims=True)
    f = objb(X)
    s, dim = X.shape
    eta = np.full(s, 0.1)
    active = np.ones(s, dtype=bool)
    dirs = np.concatenate([np.eye(dim), 1j * np.eye(dim)])
    for _ in range(steps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Xa = X[idx]
        pert = (Xa[:, None, :] + h * dirs[None]).reshape(-1, dim)
        fd = (objb(pert).reshape(idx.size, 2 * dim) - f[idx, None]) / h
        g = fd[:, :dim] + 1j * fd[:, dim:]
        gn = np.linalg.norm(g, axis=1)
        ok = (gn > 0) & np.isfinite(gn)
        g[ok] /= gn[ok, None]
        steps_ = eta[idx, None] * _ETAS[None, :]
        cand = Xa[:, None, :] + steps_[..., None] * g[:, None, :]
        cand /= np.linalg.norm(cand, axis=2, keepdims=True)
        fc = objb(cand.reshape(-1, dim)).reshape(idx.size, len(_ETAS))
        j = np.argmax(fc, axis=1)
        best = fc[np.arange(idx.size), j]
        up = ok & (best > f[idx] * (1 + 1e-13) + 1e-15)
        gi = idx[up]
        X[gi] = cand[np.flatnonzero(up), j[up]]
        f[gi] = best[up]
        eta[gi] = steps_[np.flatnonzero(up), j[up]] * 1.5
        active[idx[~up]] = False
    k = int(np.argmax(f))
    return float(f[k]), X[k]


def _starts(domain, rng: np.random.Generator, trials: int, extra=()) -> np.ndarray:
    rows = list(extra) + domain.starts() + [domain.random(rng) for _ in range(trials)]
    return np.array(rows, dtype=np.complex128)


@dataclass
class LowerBound:
    value: float
    witness: Optional[np.ndarray]


def norm_gap(phi: Character, psi: Character, trials: int = 32, ascent_steps: int = 100,
             rng: Optional[np.random.Generator] = None) -> LowerBound:
    """Lower bound on ``||Phi - Psi||`` over the unit ball of the domain."""
    dom = _check_pair(phi, psi)
    rng = np.random.default_rng(0) if rng is None else rng
    diff = Character(dom, phi.images - psi.images)
    if np.max(np.abs(diff.images), initial=0.0) == 0:
        return LowerBound(0.0, dom.one())

    def objb(X):
        return _opnorms(diff.batch(X)) / dom.fast_norms(X)

    _, x = _ascend(objb, _starts(dom, rng, trials), ascent_steps)
    val = operator_norm(diff(x)) / dom.norm(x)
    return LowerBound(float(min(val, 2.0 + 1e-9)), x)


def kernel_basis(psi: Character) -> np.ndarray:
    """Coordinate basis of ``ker Psi``, shape ``(dim, m)``."""
    M = psi.images.reshape(psi.images.shape[0], -1).T
    return null_space(M)


def kernel_norm(phi: Character, psi: Character, trials: int = 32, ascent_steps: int = 100,
                rng: Optional[np.random.Generator] = None) -> LowerBound:
    """Lower bound on ``||Phi restricted to ker Psi||``."""
    dom = _check_pair(phi, psi)
    rng = np.random.default_rng(0) if rng is None else rng
    K = kernel_basis(psi)
    if K.shape[1] == 0:
        return LowerBound(0.0, None)
    m = K.shape[1]

    def objb(Y):
        X = Y @ K.T
        return _opnorms(phi.batch(X)) / dom.fast_norms(X)

    # domain starts projected into the kernel
    proj = [K.conj().T @ s for s in dom.starts()]
    proj = [p for p in proj if np.linalg.norm(p) > 1e-12]
    starts = np.array(proj + list(np.eye(m, dtype=np.complex128)[:12]) + [
        rng.standard_normal(m) + 1j * rng.standard_normal(m) for _ in range(trials)])
    _, y = _ascend(objb, starts, ascent_steps)
    c = K @ y
    val = operator_norm(phi(c)) / dom.norm(c)
    return LowerBound(float(min(val, 1.0 + 1e-9)), c)


def _pair_rho(x: np.ndarray, y: np.ndarray) -> float:
    if x.shape == (1, 1):
        return scalar_rho(x[0, 0], y[0, 0])
    return hyperbolic_distance(x, y, margin=1e-12)


def _pair_rho_batch(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    if X.shape[1:] == (1, 1):
        a, b = X[:, 0, 0], Y[:, 0, 0]
        t = np.abs(a - b) / np.abs(1.0 - np.conj(a) * b)
        return np.arctanh(np.minimum(t, 1.0 - 1e-16))
    out = np.empty(len(X))
    for i, (x, y) in enumerate(zip(X, Y)):
        try:
            out[i] = hyperbolic_distance(x, y, margin=1e-12)
        except NotStrictContraction:
            out[i] = -np.inf
    return out


def rho_sup(phi: Character, psi: Character, r: float, trials: int = 32, ascent_steps: int = 100,
            rng: Optional[np.random.Generator] = None, warm: Sequence[np.ndarray] = ()) -> LowerBound:
    """Sampled ``sup rho(Phi(a), Psi(a))`` over ``||a|| <= r``."""
    dom = _check_pair(phi, psi)
    if not 0 < r < 1:
        raise NotStrictContraction("radius must lie in (0, 1)")
    rng = np.random.default_rng(0) if rng is None else rng

    def objb(X):
        X = X * (r / dom.fast_norms(X))[:, None]
        return _pair_rho_batch(phi.batch(X), psi.batch(X))

    _, x = _ascend(objb, _starts(dom, rng, trials, warm), ascent_steps)
    cands = [x] + [np.asarray(w) for w in warm]
    best = -np.inf
    for c in cands:
        c = c * (r / dom.norm(c))
        best = max(best, _pair_rho(phi(c), psi(c)))
    return LowerBound(float(best), x)


def rho_curve(phi: Character, psi: Character, radii: Sequence[float], trials: int = 16,
              ascent_steps: int = 60, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """``rho_sup`` along ascending radii, warm-started so the curve is monotone."""
    rng = np.random.default_rng(0) if rng is None else rng
    out, warm = [], []
    for r in radii:
        lb = rho_sup(phi, psi, r, trials, ascent_steps, rng, warm)
        out.append(max(lb.value, out[-1]) if out else lb.value)
        warm = [lb.witness]
    return np.array(out)


# Harnack certificates -------------------------------------------------------

def _largest_c(h1: np.ndarray, h2: np.ndarray, tol: float, iters: int = 60) -> float:
    """Largest ``c`` in [0, 1] with ``h1 - c h2 >= -tol``."""
    def ok(c):
        return np.linalg.eigvalsh(h1 - c * h2)[0] >= -tol

    if ok(1.0):
        return 1.0
    if not ok(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class Harnack:
    """Constants for ``Phi - c Psi`` and ``Psi - d Phi`` real positive on samples.

    ``certified`` requires both constants at least ``1e-6``; otherwise the
    counterwitness is a real-positive sample where one constant collapses.
    """

    c: float
    d: float
    certified: bool
    counterwitness: Optional[np.ndarray] = None
    samples: int = 0


def harnack_falsifier(phi: Character, psi: Character, c_grid: Optional[Sequence[float]] = None,
                      trials: int = 400, rng: Optional[np.random.Generator] = None,
                      tol: float = 1e-9) -> Harnack:
    """Sampled Harnack constants in the real-positive ordering.

    For each real-positive sample ``a`` the largest ``c <= 1`` with
    ``Re(Phi(a) - c Psi(a)) >= -tol`` is found by bisection; ``c`` is the
    minimum over samples (``d`` likewise with the roles swapped). With a
    ``c_grid`` both constants snap down to the largest passing grid value.
    """
    dom = _check_pair(phi, psi)
    rng = np.random.default_rng(0) if rng is None else rng
    samples = dom.real_positive_samples(rng, trials)
    c, d = 1.0, 1.0
    wit = None
    for a in samples:
        x, y = phi(a), psi(a)
        h1, h2 = 0.5 * (x + adjoint(x)), 0.5 * (y + adjoint(y))
        scale = max(1.0, operator_norm(h1), operator_norm(h2))
        ca = _largest_c(h1, h2, tol * scale)
        da = _largest_c(h2, h1, tol * scale)
        if min(ca, da) < min(c, d):
            wit = a
        c, d = min(c, ca), min(d, da)
    if c_grid is not None:
        grid = np.sort(np.asarray(c_grid, dtype=float))
        c = float(grid[grid <= c].max()) if np.any(grid <= c) else 0.0
        d = float(grid[grid <= d].max()) if np.any(grid <= d) else 0.0
    cert = c >= 1e-6 and d >= 1e-6
    return Harnack(float(c), float(d), cert, None if cert else wit, len(samples))


# verdict --------------------------------------------------------------------

SAME_PART = "SAME_PART"
DIFFERENT_PART = "DIFFERENT_PART"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class PartConfig:
    trials: int = 32
    ascent_steps: int = 100
    radii: Sequence[float] = (0.9, 0.99, 0.999)
    harnack_trials: int = 400
    c_grid: Optional[Sequence[float]] = None
    seed: int = 0


@dataclass
class PartVerdict:
    criteria: dict
    verdict: str
    seed: int
    harnack: Optional[dict] = None
    consistent: bool = True

    def to_dict(self) -> dict:
        out = {"criteria": self.criteria, "verdict": self.verdict, "seed": self.seed}
        if self.harnack is not None:
            out["harnack"] = self.harnack
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


RHO_DIVERGENCE_STEP = 0.5 * np.log(10.0)


def part_verdict(phi: Character, psi: Character, config: Optional[PartConfig] = None) -> PartVerdict:
    """Run the norm-gap, kernel, rho-divergence and kernel-sequence probes and the Harnack search, then classify.

    DIFFERENT_PART needs a norm gap of ``2 - 1e-6`` or a kernel norm of
    ``1 - 1e-6``. SAME_PART needs a Harnack certificate. Sampling can only
    certify one direction, so everything else is INCONCLUSIVE.
    """
    cfg = PartConfig() if config is None else config
    _check_pair(phi, psi)
    rng = np.random.default_rng(cfg.seed)
    gap = norm_gap(phi, psi, cfg.trials, cfg.ascent_steps, rng)
    kn = kernel_norm(phi, psi, cfg.trials, cfg.ascent_steps, rng)
    curve = rho_curve(phi, psi, cfg.radii, max(cfg.trials // 2, 4), max(cfg.ascent_steps // 2, 10), rng)
    # kernel-sequence probe: the kernel witness has ||Psi|| = 0 and ||Phi|| = kernel norm
    c4_phi = kn.value
    c4_violated = c4_phi >= 1.0 - 1e-6
    diverging = bool(len(curve) >= 2 and curve[-1] - curve[-2] >= RHO_DIVERGENCE_STEP)
    h = harnack_falsifier(phi, psi, cfg.c_grid, cfg.harnack_trials, rng)
    separated_gap = gap.value >= 2.0 - 1e-6
    separated_kernel = kn.value >= 1.0 - 1e-6
    criteria = {
        "norm_gap": gap.value,
        "kernel_norm": kn.value,
        "rho_sup": {f"{r:g}": float(v) for r, v in zip(cfg.radii, curve)},
        "rho_diverging": diverging,
        "kernel_sequence_phi_norm": c4_phi,
        "kernel_sequence_psi_norm": 0.0,
        "kernel_sequence_violated": c4_violated,
    }
    if separated_gap or separated_kernel:
        verdict = DIFFERENT_PART
    elif h.certified:
        verdict = SAME_PART
    else:
        verdict = INCONCLUSIVE
    # norm-gap, kernel and divergence separations must agree, and a Harnack certificate must not coexist with separation
    consistent = (separated_kernel == diverging == separated_gap
                  and not (h.certified and (separated_gap or separated_kernel)))
    harnack = {"c": h.c, "d": h.d} if h.certified else None
    return PartVerdict(criteria, verdict, cfg.seed, harnack, consistent)
