"""Dense complex matrix arithmetic, eigensolvers and functional calculus.

Every other module represents operators as ``complex128`` numpy arrays.
LAPACK (through numpy) is the default backend. Self-contained cyclic
Jacobi and Hessenberg + shifted QR solvers are available through the
``method`` argument and are cross-checked against LAPACK in the tests.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, DomainViolation, NoConvergence, NonHermitian

DEFAULT_TOL = 1e-10
HERMITIAN_THRESHOLD = 1e-8


def as_cmatrix(a, square: bool = False) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainViolation("matrix has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def operator_norm(a) -> float:
    """Largest singular value."""
    m = as_cmatrix(a)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def _check_hermitian(m: np.ndarray) -> np.ndarray:
    scale = max(operator_norm(m), 1.0)
    asym = operator_norm(m - adjoint(m)) if m.size else 0.0
    if asym > HERMITIAN_THRESHOLD * scale:
        raise NonHermitian(f"||a - a*|| = {asym:.3e} exceeds {HERMITIAN_THRESHOLD:.0e}*||a||")
    return 0.5 * (m + adjoint(m))


@dataclass(frozen=True)
class HermEig:
    """Spectral decomposition ``a = V diag(eigenvalues) V*``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ adjoint(v)


def jacobi_eigh(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi eigensolver for a Hermitian matrix.

    Returns unsorted eigenvalues and the accumulated unitary.
    """
    h = np.array(a, dtype=np.complex128)
    n = h.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = max(np.linalg.norm(h), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(h - np.diag(np.diag(h)))
        if off <= tol * scale:
            return np.real(np.diag(h)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = h[p, q]
                if abs(hpq) <= 1e-300:
                    continue
                # 2x2 unitary that diagonalizes rows/cols (p, q)
                phase = hpq / abs(hpq)
                theta = 0.5 * np.arctan2(2.0 * abs(hpq), h[p, p].real - h[q, q].real)
                c, s = np.cos(theta), np.sin(theta)
                j = np.array([[c, -s * phase], [s * np.conj(phase), c]])
                idx = [p, q]
                h[:, idx] = h[:, idx] @ j
                h[idx, :] = adjoint(j) @ h[idx, :]
                h[q, p] = 0.0
                h[p, q] = 0.0
                v[:, idx] = v[:, idx] @ j
    raise NoConvergence(f"Jacobi sweep budget {max_sweeps} exhausted")


def herm_eig(a, tol: float = DEFAULT_TOL, method: str = "lapack") -> HermEig:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    a : array_like
        Square matrix with ``||a - a*|| <= 1e-8 ||a||``; it is symmetrized first.
    tol : float
        Relative residual bound checked after the solve.
    method : {"lapack", "jacobi"}

    Returns
    -------
    HermEig
        Ascending eigenvalues and unitary eigenvectors.
    """
    m = _check_hermitian(as_cmatrix(a, square=True))
    if method == "lapack":
        w, v = np.linalg.eigh(m)
    elif method == "jacobi":
        w, v = jacobi_eigh(m)
        order = np.argsort(w, kind="stable")
        w, v = w[order], v[:, order]
    else:
        raise ValueError(f"unknown method {method!r}")
    out = HermEig(np.asarray(w, dtype=float), v)
    n = m.shape[0]
    scale = max(operator_norm(m), 1.0)
    if n:
        resid = operator_norm(m - out.reconstruct())
        orth = operator_norm(adjoint(v) @ v - np.eye(n))
        if resid > tol * scale * max(n, 1) or orth > tol * max(n, 1):
            raise NoConvergence(f"eigendecomposition residual {resid:.2e}, orthogonality {orth:.2e}")
    return out


def _hessenberg_qr_eigenvalues(a: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    """Eigenvalues from Householder Hessenberg reduction and Wilkinson-shifted QR."""
    h = np.array(a, dtype=np.complex128)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        x[0] += phase * alpha
        u = x / np.linalg.norm(x)
        h[k + 1:, :] -= 2.0 * np.outer(u, np.conj(u) @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ u, np.conj(u))
    eig = np.zeros(n, dtype=np.complex128)
    hi = n - 1
    it = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = h[0, 0]
            break
        # deflation test on the last subdiagonal
        sub = abs(h[hi, hi - 1])
        if sub <= tol * (abs(h[hi, hi]) + abs(h[hi - 1, hi - 1]) + np.finfo(float).tiny) or sub < 1e-300:
            eig[hi] = h[hi, hi]
            hi -= 1
            it = 0
            continue
        it += 1
        if it > max_iter:
            raise NoConvergence(f"QR iteration budget {max_iter} exhausted")
        blk = h[: hi + 1, : hi + 1]
        a11, a12, a21, a22 = blk[-2, -2], blk[-2, -1], blk[-1, -2], blk[-1, -1]
        tr, det = a11 + a22, a11 * a22 - a12 * a21
        disc = np.sqrt(tr * tr / 4.0 - det)
        mu1, mu2 = tr / 2.0 + disc, tr / 2.0 - disc
        mu = mu1 if abs(mu1 - a22) < abs(mu2 - a22) else mu2
        if it % 11 == 0:
            mu = a22 + sub  # exceptional shift
        q, r = np.linalg.qr(blk - mu * np.eye(hi + 1))
        h[: hi + 1, : hi + 1] = r @ q + mu * np.eye(hi + 1)
    return eig


def sort_eigenvalues(w, rel_tol: float = 1e-9) -> np.ndarray:
    """Sort by real part, then imaginary part.

    Real parts within ``rel_tol * max(1, max|w|)`` count as equal, so rounding
    noise cannot reorder a conjugate pair.
    """
    w = np.asarray(w, dtype=np.complex128).reshape(-1)
    if w.size == 0:
        return w
    q = rel_tol * max(1.0, float(np.abs(w).max()))
    return w[np.lexsort((w.imag, np.round(w.real / q)))]


def general_eigenvalues(a, tol: float = DEFAULT_TOL, method: str = "lapack", max_iter: int = 500) -> np.ndarray:
    """Eigenvalues with algebraic multiplicity, sorted by (re, im).

    Triangular inputs return their diagonal exactly.
    """
    m = as_cmatrix(a, square=True)
    if m.size == 0:
        return np.zeros(0, dtype=np.complex128)
    if not np.any(np.tril(m, -1)) or not np.any(np.triu(m, 1)):
        return sort_eigenvalues(np.diag(m).copy())
    if method == "lapack":
        w = np.linalg.eigvals(m)
    elif method == "qr":
        w = _hessenberg_qr_eigenvalues(m, tol=np.finfo(float).eps, max_iter=max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")
    return sort_eigenvalues(w)


def char_poly_residual(a, eigenvalues) -> float:
    """Max coefficient gap between ``prod (z - w_i)`` and the characteristic polynomial."""
    m = as_cmatrix(a, square=True)
    p_true = np.poly(m)
    p_eig = np.poly(np.asarray(eigenvalues))
    scale = max(1.0, operator_norm(m)) ** m.shape[0]
    return float(np.max(np.abs(p_true - p_eig)) / scale)


def func_calc(f: Callable[[np.ndarray], np.ndarray], a, domain: Optional[Tuple[float, float]] = None,
              open_left: bool = False, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Apply a real function to a Hermitian matrix, ``V f(L) V*``.

    Parameters
    ----------
    f : callable
        Vectorized real function.
    domain : (lo, hi), optional
        Allowed spectrum; eigenvalues outside raise DomainViolation.
    open_left : bool
        Treat ``lo`` as excluded (e.g. ``ln`` on ``(0, inf)``).
    """
    eig = herm_eig(a, tol=tol)
    w = eig.eigenvalues
    if domain is not None:
        lo, hi = domain
        bad = (w < lo) | (w > hi) | ((w <= lo) if open_left else False)
        if np.any(bad):
            raise DomainViolation(f"eigenvalue {w[bad][0]:.3e} outside domain {domain}")
    fw = np.asarray(f(w), dtype=float)
    if fw.shape != w.shape or not np.all(np.isfinite(fw)):
        raise DomainViolation("function is not finite on the spectrum")
    v = eig.eigenvectors
    return (v * fw) @ adjoint(v)


def modulus(a) -> np.ndarray:
    """``|a| = (a* a)^{1/2}`` from the SVD."""
    m = as_cmatrix(a, square=True)
    _, s, vh = np.linalg.svd(m)
    v = adjoint(vh)
    return (v * s) @ vh


def spectral_radius(a, tol: float = DEFAULT_TOL) -> float:
    w = general_eigenvalues(a, tol=tol)
    return float(np.max(np.abs(w))) if w.size else 0.0


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def ginibre(n: int, rng: np.random.Generator, m: Optional[int] = None) -> np.ndarray:
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2.0 * n)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    g = ginibre(n, rng)
    return 0.5 * (g + adjoint(g))


def to_json(a) -> str:
    m = as_cmatrix(a)
    flat = m.reshape(-1)
    return json.dumps({"rows": m.shape[0], "cols": m.shape[1],
                       "re": flat.real.tolist(), "im": flat.imag.tolist()})


def matrix_to_dict(a) -> dict:
    return json.loads(to_json(a))


def from_json(text) -> np.ndarray:
    """Parse the row-major ``{"rows","cols","re","im"}`` format."""
    d = json.loads(text) if isinstance(text, (str, bytes)) else dict(text)
    rows, cols = int(d["rows"]), int(d["cols"])
    re, im = list(d["re"]), list(d.get("im", [0.0] * len(d["re"])))
    if rows <= 0 or cols <= 0:
        raise DimensionMismatch("rows and cols must be positive")
    if len(re) != rows * cols or len(im) != rows * cols:
        raise DimensionMismatch(f"expected {rows * cols} entries, got re={len(re)}, im={len(im)}")
    return as_cmatrix((np.asarray(re, float) + 1j * np.asarray(im, float)).reshape(rows, cols))
