"""Ambient direct sums of matrix algebras, tracial states and nest subalgebras.

The ambient algebra ``M = M_{n_1} + ... + M_{n_K}`` is stored as one
block-diagonal ``n x n`` matrix, ``n = sum n_k``. Subalgebras are given
by boolean entry patterns, so membership is a mask test.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, DomainViolation, NotInAlgebra
from .matrix_core import as_cmatrix, func_calc, operator_norm

MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True)
class DirectSumAlgebra:
    block_sizes: Tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.block_sizes)
        if len(sizes) < 1 or any(k < 1 for k in sizes):
            raise DimensionMismatch(f"block sizes must be positive, got {self.block_sizes}")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def n(self) -> int:
        return sum(self.block_sizes)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.block_sizes)])

    def block_slices(self) -> List[slice]:
        off = self.offsets
        return [slice(int(off[k]), int(off[k + 1])) for k in range(len(self.block_sizes))]

    def pattern(self) -> np.ndarray:
        """Boolean mask of the block-diagonal entries."""
        mask = np.zeros((self.n, self.n), dtype=bool)
        for s in self.block_slices():
            mask[s, s] = True
        return mask

    def blocks(self, x) -> List[np.ndarray]:
        m = self.check(x)
        return [m[s, s] for s in self.block_slices()]

    def assemble(self, blocks: Sequence) -> np.ndarray:
        if len(blocks) != len(self.block_sizes):
            raise DimensionMismatch("wrong number of blocks")
        out = np.zeros((self.n, self.n), dtype=np.complex128)
        for s, b, k in zip(self.block_slices(), blocks, self.block_sizes):
            b = as_cmatrix(b)
            if b.shape != (k, k):
                raise DimensionMismatch(f"block of shape {b.shape}, expected {(k, k)}")
            out[s, s] = b
        return out

    def check(self, x, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        """Validate shape and block diagonality; returns the matrix."""
        m = as_cmatrix(x, square=True)
        if m.shape[0] != self.n:
            raise DimensionMismatch(f"matrix of size {m.shape[0]}, algebra has n = {self.n}")
        leak = np.max(np.abs(m[~self.pattern()]), initial=0.0)
        if leak > tol * max(1.0, operator_norm(m)):
            raise NotInAlgebra(f"off-block entry of modulus {leak:.3e}")
        return m

    def identity(self) -> np.ndarray:
        return np.eye(self.n, dtype=np.complex128)

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        z = rng.standard_normal((self.n, self.n)) + 1j * rng.standard_normal((self.n, self.n))
        return scale * z * self.pattern() / np.sqrt(2.0 * max(self.block_sizes))


@dataclass(frozen=True)
class TracialState:
    """``tau(x) = sum_k c_k tr(x_k) / n_k``."""

    algebra: DirectSumAlgebra
    weights: Tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(c) for c in self.weights)
        if len(w) != len(self.algebra.block_sizes):
            raise DimensionMismatch("one weight per block is required")
        if any(c < 0 for c in w) or abs(sum(w) - 1.0) > 1e-12:
            raise DomainViolation(f"weights must be non-negative and sum to 1, got {w}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, algebra: DirectSumAlgebra) -> "TracialState":
        k = len(algebra.block_sizes)
        return cls(algebra, tuple([1.0 / k] * k))

    @property
    def faithful(self) -> bool:
        return all(c > 0 for c in self.weights)

    @property
    def n(self) -> int:
        return self.algebra.n

    def diag_weights(self) -> np.ndarray:
        """Per-index weight ``c_k / n_k`` so that ``tau(x) = sum_i w_i x_ii``."""
        return np.concatenate([np.full(k, c / k) for k, c in zip(self.algebra.block_sizes, self.weights)])

    def supported(self) -> List[int]:
        return [k for k, c in enumerate(self.weights) if c > 0]

    def __call__(self, x) -> complex:
        return trace_eval(self, x)

    def l2_norm(self, x) -> float:
        """``||x||_2 = tau(|x|^2)^{1/2}``."""
        m = as_cmatrix(x, square=True)
        w = self.diag_weights()
        return float(np.sqrt(max(np.sum(w * np.sum(np.abs(m) ** 2, axis=0)), 0.0)))


def trace_eval(tau: TracialState, x) -> complex:
    m = as_cmatrix(x, square=True)
    if m.shape[0] != tau.n:
        raise DimensionMismatch(f"matrix of size {m.shape[0]}, state on n = {tau.n}")
    return complex(np.sum(tau.diag_weights() * np.diag(m)))


@dataclass(frozen=True)
class SupportReduction:
    """Support projection ``z`` and the reduced faithful model."""

    z: np.ndarray
    kept_blocks: Tuple[int, ...]
    reduced_algebra: DirectSumAlgebra
    reduced_state: TracialState
    index: np.ndarray  # ambient indices retained by the reduction

    def reduce(self, x) -> np.ndarray:
        m = as_cmatrix(x, square=True)
        return m[np.ix_(self.index, self.index)]


def support_projection(tau: TracialState) -> SupportReduction:
    alg = tau.algebra
    kept = tuple(tau.supported())
    diag = np.zeros(alg.n)
    slices = alg.block_slices()
    for k in kept:
        diag[slices[k]] = 1.0
    index = np.flatnonzero(diag)
    red_alg = DirectSumAlgebra(tuple(alg.block_sizes[k] for k in kept))
    red_w = np.array([tau.weights[k] for k in kept])
    red_state = TracialState(red_alg, tuple(red_w / red_w.sum()))
    return SupportReduction(np.diag(diag).astype(np.complex128), kept, red_alg, red_state, index)


def zcalc_check(x, z, f: Callable[[np.ndarray], np.ndarray], domain: Optional[Tuple[float, float]] = None,
                open_left: bool = False) -> float:
    """Residual of ``f(xz) = f(x) z`` on ``zMz``.

    ``f(xz)`` is evaluated on the compression to the range of ``z`` where
    ``xz`` is invertible, so functions such as ``ln`` stay defined.
    """
    m = as_cmatrix(x, square=True)
    zz = as_cmatrix(z, square=True)
    if m.shape != zz.shape:
        raise DimensionMismatch("x and z differ in size")
    idx = np.flatnonzero(np.abs(np.diag(zz)) > 0.5)
    xz = (m @ zz)[np.ix_(idx, idx)]
    left = func_calc(f, xz, domain=domain, open_left=open_left)
    right = (func_calc(f, m, domain=domain, open_left=open_left) @ zz)[np.ix_(idx, idx)]
    return operator_norm(left - right)


@dataclass(frozen=True)
class Membership:
    member: bool
    diagnostic: float

    def __bool__(self):
        return self.member


class PatternSubalgebra:
    """Subspace of ``M_n`` defined by an allowed-entry mask."""

    def __init__(self, algebra: DirectSumAlgebra, mask: np.ndarray):
        self.algebra = algebra
        self.mask = np.asarray(mask, dtype=bool)
        if self.mask.shape != (algebra.n, algebra.n):
            raise DimensionMismatch("mask shape does not match the algebra")

    @property
    def n(self) -> int:
        return self.algebra.n

    @property
    def dim(self) -> int:
        return int(self.mask.sum())

    def membership(self, x, tol: float = MEMBERSHIP_TOL) -> Membership:
        m = as_cmatrix(x, square=True)
        if m.shape[0] != self.n:
            raise DimensionMismatch(f"matrix of size {m.shape[0]}, algebra has n = {self.n}")
        scale = max(1.0, operator_norm(m))
        diag = float(np.max(np.abs(m[~self.mask]), initial=0.0))
        return Membership(diag <= tol * scale, diag)

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.membership(x, tol).member

    def project(self, x) -> np.ndarray:
        """Entrywise compression to the pattern."""
        return as_cmatrix(x, square=True) * self.mask

    def basis(self) -> np.ndarray:
        """Matrix units ``E_ij`` with ``(i, j)`` in the mask, shape ``(dim, n, n)``."""
        rows, cols = np.nonzero(self.mask)
        out = np.zeros((len(rows), self.n, self.n), dtype=np.complex128)
        out[np.arange(len(rows)), rows, cols] = 1.0
        return out

    def coords(self, x) -> np.ndarray:
        return as_cmatrix(x, square=True)[self.mask]

    def element(self, coords) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.complex128)
        out[self.mask] = coords
        return out

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        z = rng.standard_normal((self.n, self.n)) + 1j * rng.standard_normal((self.n, self.n))
        return scale * z * self.mask / np.sqrt(2.0 * self.n)


def _cell_labels(algebra: DirectSumAlgebra, flags) -> Tuple[np.ndarray, np.ndarray, List[Tuple[int, int]]]:
    block_of = np.zeros(algebra.n, dtype=int)
    cell_of = np.zeros(algebra.n, dtype=int)
    cells: List[Tuple[int, int]] = []
    if len(flags) != len(algebra.block_sizes):
        raise DimensionMismatch("one flag per block is required")
    pos = 0
    cid = 0
    for k, (size, flag) in enumerate(zip(algebra.block_sizes, flags)):
        flag = [int(c) for c in flag]
        if any(c < 1 for c in flag) or sum(flag) != size:
            raise DimensionMismatch(f"flag {flag} does not partition block of size {size}")
        for c in flag:
            block_of[pos:pos + c] = k
            cell_of[pos:pos + c] = cid
            cells.append((pos, pos + c))
            pos += c
            cid += 1
    return block_of, cell_of, cells


class NestSubalgebra(PatternSubalgebra):
    """Block upper-triangular matrices with respect to a flag of consecutive cells."""

    def __init__(self, algebra: DirectSumAlgebra, flags=None):
        if flags is None:
            flags = [[1] * k for k in algebra.block_sizes]
        self.flags = tuple(tuple(int(c) for c in f) for f in flags)
        block_of, cell_of, cells = _cell_labels(algebra, self.flags)
        self.block_of, self.cell_of, self.cells = block_of, cell_of, cells
        mask = (block_of[:, None] == block_of[None, :]) & (cell_of[:, None] <= cell_of[None, :])
        super().__init__(algebra, mask)

    def diagonal(self) -> "DiagonalSubalgebra":
        return DiagonalSubalgebra(self)

    def strictly_upper_mask(self) -> np.ndarray:
        return self.mask & ~self.diagonal().mask


class DiagonalSubalgebra(PatternSubalgebra):
    """``D = A cap A*``: the direct sum of the full algebras on the flag cells."""

    def __init__(self, nest: NestSubalgebra):
        self.nest = nest
        mask = nest.cell_of[:, None] == nest.cell_of[None, :]
        super().__init__(nest.algebra, mask)

    @property
    def cells(self):
        return self.nest.cells

    def random_invertible(self, rng: np.random.Generator) -> np.ndarray:
        """Identity plus a cellwise perturbation of norm at most 1/2."""
        g = self.random_element(rng)
        g = g / max(2.0 * operator_norm(g), 1e-300)
        return np.eye(self.n) + g


@dataclass(frozen=True)
class AlgebraDescriptor:
    algebra: DirectSumAlgebra
    state: TracialState
    nest: NestSubalgebra = field(compare=False)


def descriptor_to_json(tau: TracialState, nest: NestSubalgebra) -> str:
    return json.dumps({"blocks": list(tau.algebra.block_sizes), "weights": list(tau.weights),
                       "flags": [list(f) for f in nest.flags]})


def descriptor_from_json(text) -> AlgebraDescriptor:
    d = json.loads(text) if isinstance(text, (str, bytes)) else dict(text)
    alg = DirectSumAlgebra(tuple(d["blocks"]))
    tau = TracialState(alg, tuple(d["weights"]))
    nest = NestSubalgebra(alg, d.get("flags"))
    return AlgebraDescriptor(alg, tau, nest)


def random_flag(size: int, rng: np.random.Generator) -> Tuple[int, ...]:
    """Random composition of ``size`` into consecutive cells."""
    cuts = np.flatnonzero(rng.random(size - 1) < 0.5) + 1
    edges = np.concatenate([[0], cuts, [size]])
    return tuple(int(c) for c in np.diff(edges))
