"""Jordan homomorphisms, the square-zero identity and a 4x4 counterexample.

The fixture is ``A = C I + J + C E14`` inside ``M_4`` with
``J = {alpha (E12 + E34) + beta (E13 - E24)}``, the range
``B = C I + C E14`` and ``P(alpha I + x + beta E14) = alpha I + beta E14``.
``P`` is a unital idempotent Jordan homomorphism and ``B``-bimodule map
that fails to be multiplicative because ``B`` is not self-adjoint.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import least_squares

from .algebra import DirectSumAlgebra, NestSubalgebra, random_flag
from .errors import PreconditionViolated
from .maps import LinearMapOnAlgebra, MatrixSubspace
from .matrix_core import adjoint, as_cmatrix, operator_norm


def unit(n: int, i: int, j: int) -> np.ndarray:
    """Matrix unit ``E_ij`` with 1-based indices."""
    e = np.zeros((n, n), dtype=np.complex128)
    e[i - 1, j - 1] = 1.0
    return e


@dataclass(frozen=True)
class HomCheck:
    ok: bool
    residual: float
    witness: Optional[Tuple[int, int]] = None
    product_image: Optional[np.ndarray] = None  # T(e_i e_j) at the witness
    image_product: Optional[np.ndarray] = None  # T(e_i) T(e_j) at the witness

    def __bool__(self):
        return self.ok


def is_jordan_hom(T: LinearMapOnAlgebra, tol: float = 1e-10) -> HomCheck:
    """Polarized square test ``T(ab + ba) = T(a)T(b) + T(b)T(a)`` on basis pairs."""
    basis, img = T.domain.basis(), T.images
    worst, arg = 0.0, None
    for i in range(len(basis)):
        for j in range(i, len(basis)):
            lhs = T(basis[i] @ basis[j] + basis[j] @ basis[i])
            rhs = img[i] @ img[j] + img[j] @ img[i]
            r = operator_norm(lhs - rhs)
            if r > worst:
                worst, arg = r, (i, j)
    return HomCheck(worst <= tol, worst, arg)


def is_hom(T: LinearMapOnAlgebra, tol: float = 1e-10) -> HomCheck:
    """``T(ab) = T(a)T(b)`` on ordered basis pairs; the witness is the worst pair."""
    basis, img = T.domain.basis(), T.images
    worst, arg, pi, ip = 0.0, None, None, None
    for i in range(len(basis)):
        for j in range(len(basis)):
            lhs = T(basis[i] @ basis[j])
            rhs = img[i] @ img[j]
            r = operator_norm(lhs - rhs)
            if r > worst:
                worst, arg, pi, ip = r, (i, j), lhs, rhs
    return HomCheck(worst <= tol, worst, arg, pi, ip)


def jordan_triple_residual(T: LinearMapOnAlgebra) -> float:
    """``max ||T(aba) - T(a)T(b)T(a)||`` with ``a = e_i + e_k`` and ``b = e_j``."""
    basis, img = T.domain.basis(), T.images
    worst = 0.0
    m = len(basis)
    for i in range(m):
        for k in range(i, m):
            a = basis[i] + (basis[k] if k != i else 0)
            ta = img[i] + (img[k] if k != i else 0)
            for j in range(m):
                r = operator_norm(T(a @ basis[j] @ a) - ta @ img[j] @ ta)
                worst = max(worst, r)
    return worst


def square_zero_check(T: LinearMapOnAlgebra, a, b, tol: float = 1e-10) -> float:
    """``max(||T(ab)^2||, ||T(ba)^2||)`` for ``a`` in the kernel of a Jordan map."""
    jc = is_jordan_hom(T, tol=max(tol, 1e-10))
    if not jc.ok:
        raise PreconditionViolated("T is not a Jordan homomorphism", jc.residual)
    a, b = as_cmatrix(a, square=True), as_cmatrix(b, square=True)
    ta = operator_norm(T(a))
    if ta > tol * max(1.0, operator_norm(a)):
        raise PreconditionViolated(f"||T(a)|| = {ta:.3e}, a is not in the kernel", ta)
    x, y = T(a @ b), T(b @ a)
    return max(operator_norm(x @ x), operator_norm(y @ y))


@dataclass(frozen=True)
class Fixture:
    A: MatrixSubspace
    B: MatrixSubspace
    P: LinearMapOnAlgebra
    J1: np.ndarray
    J2: np.ndarray
    E14: np.ndarray

    def element(self, alpha, x_alpha, x_beta, beta) -> np.ndarray:
        return alpha * np.eye(4) + x_alpha * self.J1 + x_beta * self.J2 + beta * self.E14


def counterexample_fixture() -> Fixture:
    J1 = unit(4, 1, 2) + unit(4, 3, 4)
    J2 = unit(4, 1, 3) - unit(4, 2, 4)
    E14 = unit(4, 1, 4)
    I4 = np.eye(4, dtype=np.complex128)
    A = MatrixSubspace(np.array([I4, J1, J2, E14]))
    B = MatrixSubspace(np.array([I4, E14]))
    # drop the middle rows and columns: a -> a_11 I + a_14 E14
    P = LinearMapOnAlgebra(A, np.array([I4, 0 * I4, 0 * I4, E14]), B.basis(), name="4x4 fixture")
    return Fixture(A, B, P, J1, J2, E14)


def fixture_contractivity(fx: Fixture, samples: int, rng: np.random.Generator) -> float:
    """Max ``||P(a)|| - ||a||`` over random ``a`` in ``A``; should be <= 0."""
    worst = -np.inf
    for _ in range(samples):
        c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        a = fx.A.element(c * 10.0 ** rng.uniform(-1, 1, 4))
        worst = max(worst, operator_norm(fx.P(a)) - operator_norm(a))
    return worst


def is_star_closed(space: MatrixSubspace, tol: float = 1e-10) -> bool:
    return all(space.contains(adjoint(b), tol) for b in space.basis())


# Projection search: idempotent Jordan bimodule maps onto *-closed ranges ------

@dataclass
class StarConfig:
    nest: NestSubalgebra
    d_basis: np.ndarray
    description: str


def random_star_config(rng: np.random.Generator, max_n: int = 4) -> StarConfig:
    """Random nest algebra with a *-closed unital subalgebra ``D`` of ``A cap A*``.

    Cells are grouped at random; a group is either scalar (``C`` times the
    group identity) or, for single cells, the full matrix algebra of the cell.
    """
    n_blocks = int(rng.integers(1, 3))
    sizes = []
    remaining = max_n
    for _ in range(n_blocks):
        if remaining < 1:
            break
        s = int(rng.integers(1, remaining + 1))
        sizes.append(s)
        remaining -= s
    alg = DirectSumAlgebra(tuple(sizes))
    nest = NestSubalgebra(alg, [random_flag(s, rng) for s in sizes])
    cells = nest.cells
    labels = rng.integers(0, len(cells), len(cells))
    groups = [np.flatnonzero(labels == g) for g in np.unique(labels)]
    basis: List[np.ndarray] = []
    desc = []
    n = alg.n
    for g in groups:
        full = len(g) == 1 and rng.random() < 0.5
        if full:
            lo, hi = cells[g[0]]
            for i in range(lo, hi):
                for j in range(lo, hi):
                    e = np.zeros((n, n), dtype=np.complex128)
                    e[i, j] = 1.0
                    basis.append(e)
            desc.append(f"M{hi - lo}")
        else:
            e = np.zeros((n, n), dtype=np.complex128)
            for c in g:
                lo, hi = cells[c]
                e[lo:hi, lo:hi] = np.eye(hi - lo)
            basis.append(e)
            desc.append("C" + "+".join(str(cells[c][1] - cells[c][0]) for c in g))
    return StarConfig(nest, np.array(basis), f"blocks={sizes} flags={nest.flags} D={' '.join(desc)}")


def _bimodule_affine_space(cfg: StarConfig):
    """Affine parametrization ``X0 + N y`` of idempotent D-bimodule maps ``A -> D``."""
    A = MatrixSubspace(cfg.nest.basis())
    Dsp = MatrixSubspace(cfg.d_basis)
    k, m = Dsp.dim, A.dim
    a_basis = A.basis()

    def apply(x, y):
        return np.tensordot(x @ A.coords(y), cfg.d_basis, axes=1)

    def residuals(x):
        out = [(apply(x, d) - d).ravel() for d in cfg.d_basis]
        for g in cfg.d_basis:
            for e in a_basis:
                pe = apply(x, e)
                out.append((apply(x, g @ e) - g @ pe).ravel())
                out.append((apply(x, e @ g) - pe @ g).ravel())
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
    x0, *_ = np.linalg.lstsq(L, b, rcond=None)
    # tall constraint matrix: the R factor has the same right singular vectors
    R = np.linalg.qr(L, mode="r") if L.shape[0] > L.shape[1] else L
    null = null_space(R, rcond=1e-9)
    return A, x0, null, (k, m)


def lfix_search(cfg: StarConfig, starts: int = 4, rng: Optional[np.random.Generator] = None):
    """Look for Jordan maps in the affine space that are not homomorphisms.

    Returns
    -------
    found : int
        Number of starts converging to a Jordan homomorphism.
    counterexamples : list of LinearMapOnAlgebra
        Jordan maps whose hom residual exceeds ``max(1e-6, 10 sqrt(jordan residual))``.
        The square-root allowance reflects the square-zero argument.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    A, x0, null, shape = _bimodule_affine_space(cfg)
    maps = []
    if null.shape[1] == 0:
        maps.append(x0.reshape(shape))
    else:
        a_basis = A.basis()
        Dsp = MatrixSubspace(cfg.d_basis)
        pairs = np.array([(i, j) for i in range(len(a_basis)) for j in range(i, len(a_basis))])
        S = np.array([A.coords(a_basis[i] @ a_basis[j] + a_basis[j] @ a_basis[i]) for i, j in pairs]).T
        # structure constants d_a d_b = sum_c C[a, b, c] d_c
        C = np.array([[Dsp.coords(da @ db) for db in cfg.d_basis] for da in cfg.d_basis])
        Nq = null.T.reshape(-1, *shape)
        X0 = x0.reshape(shape)
        P_i, P_j = pairs[:, 0], pairs[:, 1]
        p = Nq.shape[0]

        def quad(U, V):
            # sum_ab C_abc (U_a,i V_b,j + U_a,j V_b,i) for every pair
            return (np.einsum("abc,ap,bp->cp", C, U[:, P_i], V[:, P_j])
                    + np.einsum("abc,ap,bp->cp", C, U[:, P_j], V[:, P_i]))

        def coef(yr):
            return X0 + np.tensordot(yr[:p] + 1j * yr[p:], Nq, axes=1)

        def jordan_res(yr):
            X = coef(yr)
            r = (X @ S - quad(X, X)).ravel()
            return np.concatenate([r.real, r.imag])

        def jordan_jac(yr):
            X = coef(yr)
            J = np.stack([(N @ S - quad(N, X) - quad(X, N)).ravel() for N in Nq], axis=1)
            return np.block([[J.real, -J.imag], [J.imag, J.real]])

        for _ in range(starts):
            y0 = rng.standard_normal(2 * p)
            sol = least_squares(jordan_res, y0, jac=jordan_jac, method="lm", xtol=1e-15, ftol=1e-15,
                                gtol=1e-15, max_nfev=200)
            maps.append(coef(sol.x))
    found, bad = 0, []
    for x in maps:
        T = LinearMapOnAlgebra(A, np.tensordot(x.T, cfg.d_basis, axes=1), cfg.d_basis)
        jr = is_jordan_hom(T, tol=1e-8)
        if not jr.ok:
            continue
        found += 1
        hr = is_hom(T, tol=max(1e-6, 10.0 * np.sqrt(jr.residual)))
        if not hr.ok:
            bad.append(T)
    return found, bad


def shear_twist(nest_2x2: NestSubalgebra) -> LinearMapOnAlgebra:
    """``T(a) = Phi(a) + a_12 E22`` on upper triangular 2x2; breaks ``T(a^2) = T(a)^2``."""
    D = nest_2x2.diagonal()
    return LinearMapOnAlgebra.from_function(nest_2x2, lambda e: e * D.mask + e[0, 1] * unit(2, 2, 2),
                                            D.basis(), name="shear twist")
