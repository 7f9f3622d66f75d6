"""Weighted Hardy spaces on the circle at Fourier truncation, the Wermer
embedding element and finite Hankel sections.

Everything lives on the torus model ``H^inf subset L^inf(T)`` truncated
at degree ``N``. A weight ``w`` on the grid ``theta_j = 2 pi j / G``
defines the state ``omega(f) = mean(w f)``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import solve_toeplitz, subspace_angles, svdvals

from .errors import DegenerateState, DomainViolation, NonPositiveWeight, TruncationTooSmall


def grid(G: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(G) / G


def analytic_values(coef, G: int) -> np.ndarray:
    """Grid values of ``sum_k coef[k] z^k``."""
    return np.fft.ifft(np.asarray(coef, dtype=np.complex128), n=G) * G


class FourierSymbol:
    """Trigonometric polynomial ``sum_{|m| <= N} c_m z^m``."""

    def __init__(self, coeffs, N: Optional[int] = None):
        c = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
        if c.size % 2 == 0:
            raise DomainViolation("need 2N + 1 coefficients indexed -N..N")
        if not np.all(np.isfinite(c)):
            raise DomainViolation("coefficients must be finite")
        self.N = c.size // 2 if N is None else int(N)
        if c.size != 2 * self.N + 1:
            raise DomainViolation("coefficient count does not match N")
        self.coeffs = c

    @classmethod
    def from_dict(cls, coef: dict, N: int) -> "FourierSymbol":
        c = np.zeros(2 * N + 1, dtype=np.complex128)
        for m, v in coef.items():
            if abs(m) > N:
                raise TruncationTooSmall(f"coefficient {m} outside order {N}")
            c[m + N] = v
        return cls(c)

    @classmethod
    def from_function(cls, f, N: int, G: Optional[int] = None) -> "FourierSymbol":
        G = 8 * N if G is None else G
        vals = np.asarray(f(np.exp(1j * grid(G))), dtype=np.complex128)
        hat = np.fft.fft(vals) / G
        m = np.arange(-N, N + 1)
        return cls(hat[m % G])

    def coef(self, m: int) -> complex:
        return complex(self.coeffs[m + self.N]) if abs(m) <= self.N else 0.0

    def values(self, G: int) -> np.ndarray:
        m = np.arange(-self.N, self.N + 1)
        return np.exp(1j * np.outer(grid(G), m)) @ self.coeffs

    def analytic_part(self) -> "FourierSymbol":
        c = self.coeffs.copy()
        c[: self.N] = 0
        return FourierSymbol(c)

    def to_json(self) -> str:
        return json.dumps({"N": self.N, "re": self.coeffs.real.tolist(), "im": self.coeffs.imag.tolist()},
                          sort_keys=True)

    @classmethod
    def from_json(cls, text) -> "FourierSymbol":
        d = json.loads(text) if isinstance(text, (str, bytes)) else dict(text)
        return cls(np.asarray(d["re"], float) + 1j * np.asarray(d["im"], float), int(d["N"]))


# weights and models ---------------------------------------------------------

def poisson_weight(lam: complex, G: int) -> np.ndarray:
    """Poisson kernel at ``lam`` on the grid; integrating against it evaluates analytic polynomials at ``lam``."""
    if abs(lam) >= 1:
        raise DomainViolation("Poisson parameter must lie in the open disk")
    return (1.0 - abs(lam) ** 2) / np.abs(np.exp(1j * grid(G)) - lam) ** 2


@dataclass(frozen=True)
class WeightCheck:
    alpha: float
    beta: float
    verdict: str

    @property
    def ratio(self) -> float:
        return self.beta / self.alpha


def gleason_weight_check(w) -> WeightCheck:
    """Bounds ``alpha tau <= omega <= beta tau`` read off the weight samples."""
    w = np.asarray(w, dtype=float)
    if np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise NonPositiveWeight("weight samples must be strictly positive")
    return WeightCheck(float(w.min()), float(w.max()), "SAME_PART_AS_TRACE")


class HardyModel:
    """Truncated ``H^2(omega)`` with ``G >= 4N`` grid points (``8N`` by default)."""

    def __init__(self, N: int, weight, G: Optional[int] = None):
        self.N = int(N)
        w = np.asarray(weight, dtype=float).reshape(-1) if not callable(weight) else None
        self.G = int(G if G is not None else (w.size if w is not None else 8 * self.N))
        if self.G < 4 * self.N:
            raise TruncationTooSmall(f"grid {self.G} below 4N = {4 * self.N}")
        if w is None:
            w = np.asarray(weight(grid(self.G)), dtype=float)
        if w.size != self.G:
            raise DomainViolation("weight samples do not match the grid")
        chk = gleason_weight_check(w)
        total = w.mean()
        self.w = w / total
        self.alpha, self.beta = chk.alpha / total, chk.beta / total

    @classmethod
    def poisson(cls, lam: complex, N: int, G: Optional[int] = None) -> "HardyModel":
        G = 8 * N if G is None else G
        return cls(N, poisson_weight(lam, G), G)

    @property
    def theta(self) -> np.ndarray:
        return grid(self.G)

    def omega(self, vals) -> complex:
        return complex(np.mean(self.w * vals))

    def inner(self, f_vals, g_vals) -> complex:
        """``<f, g>_omega = omega(g* f)`` from grid values."""
        return complex(np.mean(self.w * f_vals * np.conj(g_vals)))

    def tau_inner(self, f_vals, g_vals) -> complex:
        return complex(np.mean(f_vals * np.conj(g_vals)))

    def weight_coefficients(self, M: int) -> np.ndarray:
        """``hat w(m)`` for ``m = 0..M``."""
        hat = np.fft.fft(self.w) / self.G
        return hat[: M + 1]


# Wermer embedding -------------------------------------------------------------

@dataclass
class WermerResult:
    z_r: np.ndarray          # analytic coefficients, degrees 0..N
    c: float
    diagnostics: dict


def _project_one(model: HardyModel) -> np.ndarray:
    # Gram of z..z^N is Toeplitz with entries hat w(j - k)
    hat = model.weight_coefficients(model.N)
    col = hat[: model.N]
    row = np.conj(hat[: model.N])
    a = solve_toeplitz((col, row), hat[1: model.N + 1])
    return np.concatenate([[0.0], a])


def _window_angle(z: np.ndarray, K: int) -> float:
    """Largest principal angle between ``P_{<=K}(z H^2)`` and ``span{z..z^K}``."""
    cols = []
    for k in range(K):
        v = np.zeros(K + 1, dtype=np.complex128)
        seg = z[: K + 1 - k]
        v[k: k + seg.size] = seg
        cols.append(v)
    Z = np.stack(cols, axis=1)
    E = np.eye(K + 1)[:, 1:]
    return float(np.max(subspace_angles(Z, E)))


def wermer_embedding(model: HardyModel, degenerate_tol: float = 1e-12) -> WermerResult:
    """``e`` = omega-projection of 1 onto ``span{z..z^N}``, ``c = ||e||_omega``, ``z_r = e / c``.

    Diagnostics are evaluated by grid quadrature, independently of the
    Toeplitz solve.
    """
    e = _project_one(model)
    G, N = model.G, model.N
    ev = analytic_values(e, G)
    c2 = model.inner(ev, ev).real
    if c2 <= degenerate_tol:
        raise DegenerateState(f"c^2 = {c2:.3e}: omega agrees with tau on A_0")
    c = float(np.sqrt(c2))
    z = e / c
    zv = ev / c
    t = model.theta
    ortho = max(abs(model.inner(1.0 - ev, np.exp(1j * m * t))) for m in range(1, N + 1))
    const = abs(np.mean(zv))
    h = model.w
    # v = c^{-1} h^{-1/2} e h^{1/2} reduces to z_r when the weight commutes
    v = (np.sqrt(h) ** -1) * zv * np.sqrt(h)
    K = N // 2
    diag = {
        "constant_term": float(const),
        "orthogonality_residual": float(ortho),
        "c2_minus_omega_e": float(abs(c2 - model.omega(ev))),
        "min_modulus": float(np.abs(zv).min()),
        "sup_norm": float(np.abs(zv).max()),
        "unimodularity_residual": float(np.abs(np.abs(zv) - 1.0).max()),
        "v_minus_z": float(np.abs(v - zv).max()),
        "subspace_angle": _window_angle(z, K),
        "degree_window": K,
        "alpha_over_beta": model.alpha / model.beta,
    }
    return WermerResult(z, c, diag)


def left_embedding_residual(model: HardyModel) -> float:
    """``max |z_l - z_r|`` on the grid with ``z_l = w_r*``.

    ``w_r`` is built from the co-analytic projection of 1 onto
    ``span{conj(z)..conj(z)^N}``; in the commutative model its adjoint
    must reproduce ``z_r``.
    """
    zr = analytic_values(wermer_embedding(model).z_r, model.G)
    hat = np.conj(model.weight_coefficients(model.N))  # weight coefficients for conj(z)^m
    b = solve_toeplitz((hat[: model.N], np.conj(hat[: model.N])), hat[1: model.N + 1])
    t = model.theta
    wv = np.exp(-1j * np.outer(t, np.arange(1, model.N + 1))) @ b
    wv /= np.sqrt(model.inner(wv, wv).real)
    return float(np.abs(np.conj(wv) - zr).max())


def multiplicativity_residual(model: HardyModel, rng: np.random.Generator, trials: int = 20) -> float:
    """``max |omega(fg) - omega(f) omega(g)|`` over analytic ``f, g`` of degree ``<= N/2``."""
    K = model.N // 2
    worst = 0.0
    for _ in range(trials):
        f = rng.standard_normal(K + 1) + 1j * rng.standard_normal(K + 1)
        g = rng.standard_normal(K + 1) + 1j * rng.standard_normal(K + 1)
        fv, gv = analytic_values(f, model.G), analytic_values(g, model.G)
        scale = max(1.0, np.linalg.norm(f) * np.linalg.norm(g))
        worst = max(worst, abs(model.omega(fv * gv) - model.omega(fv) * model.omega(gv)) / scale)
    return worst


# Hankel sections --------------------------------------------------------------

def hankel_matrix(f: FourierSymbol, N: int) -> np.ndarray:
    """``H[j-1, k] = c_{-(j+k)}`` for ``j = 1..N``, ``k = 0..N-1``.

    Column ``k`` is the co-analytic part of ``f z^k`` read in the basis
    ``conj(z), conj(z)^2, ...``.
    """
    if 2 * N - 1 > f.N:
        raise TruncationTooSmall(f"symbol order {f.N} below 2N - 1 = {2 * N - 1}")
    j = np.arange(1, N + 1)[:, None]
    k = np.arange(N)[None, :]
    return f.coeffs[f.N - (j + k)]


def nehari_bound(f: FourierSymbol, G: Optional[int] = None) -> float:
    """``||f - P_+ f||_inf`` on a grid, an upper bound for every finite section norm."""
    G = 16 * f.N if G is None else G
    return float(np.abs((f.coeffs - f.analytic_part().coeffs) @ np.exp(
        1j * np.outer(np.arange(-f.N, f.N + 1), grid(G)))).max())


DECAYING = "DECAYING"
NON_COMPACT = "NON_COMPACT_SIGNATURE"


@dataclass
class Profile:
    N_list: List[int]
    sigmas: List[np.ndarray]     # leading singular values per N
    tails: List[float]           # sigma at index N // 8 per N
    verdict: str

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["N", "k", "sigma_k", "verdict"])
        for N, s in zip(self.N_list, self.sigmas):
            for k, v in enumerate(s, start=1):
                wr.writerow([N, k, repr(float(v)), self.verdict])
        return buf.getvalue()


def compactness_profile(f: FourierSymbol, N_list: Sequence[int], top: int = 10) -> Profile:
    """Leading singular values of ``H_f^{(N)}`` across ascending ``N``.

    DECAYING when ``sigma_1`` settles (relative change at most 1e-3 over
    the last step) and the fixed-fraction singular value ``sigma_{N/8}``
    either vanishes or halves across the list; otherwise the sections
    carry a non-compact signature.
    """
    Ns = [int(n) for n in N_list]
    if sorted(Ns) != Ns:
        raise DomainViolation("N_list must be ascending")
    sig, tails = [], []
    for N in Ns:
        s = svdvals(hankel_matrix(f, N))
        sig.append(s[:top])
        tails.append(float(s[max(1, N // 8)]) if N > 1 else 0.0)
    s1 = [float(s[0]) for s in sig]
    scale = max(1.0, s1[-1])
    stable = len(s1) < 2 or abs(s1[-1] - s1[-2]) <= 1e-3 * scale
    vanish = tails[-1] <= 1e-10 * scale
    shrink = len(tails) >= 2 and tails[-1] <= 0.5 * tails[0]
    verdict = DECAYING if stable and (vanish or shrink) else NON_COMPACT
    return Profile(Ns, sig, tails, verdict)
