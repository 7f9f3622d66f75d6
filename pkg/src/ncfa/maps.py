"""Finite-dimensional subspaces of ``M_n`` and linear maps defined on a basis."""
from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, NotInSubalgebra
from .matrix_core import as_cmatrix, operator_norm


def _as_basis(basis) -> np.ndarray:
    if hasattr(basis, "basis"):
        basis = basis.basis()
    b = np.asarray(basis, dtype=np.complex128)
    if b.ndim != 3 or b.shape[1] != b.shape[2]:
        raise DimensionMismatch(f"basis must have shape (dim, n, n), got {b.shape}")
    return b


class MatrixSubspace:
    """Span of a list of ``n x n`` matrices with least-squares coordinates."""

    def __init__(self, basis, tol: float = 1e-10):
        self._basis = _as_basis(basis)
        self.tol = tol
        flat = self._basis.reshape(len(self._basis), -1).T
        self._pinv = np.linalg.pinv(flat)
        self._flat = flat
        if np.linalg.matrix_rank(flat, tol=1e-10) != len(self._basis):
            raise DimensionMismatch("basis is linearly dependent")

    @property
    def n(self) -> int:
        return self._basis.shape[1]

    @property
    def dim(self) -> int:
        return self._basis.shape[0]

    def basis(self) -> np.ndarray:
        return self._basis

    def coords(self, x) -> np.ndarray:
        return self._pinv @ as_cmatrix(x, square=True).reshape(-1)

    def element(self, coords) -> np.ndarray:
        return np.tensordot(np.asarray(coords), self._basis, axes=1)

    def residual(self, x) -> float:
        m = as_cmatrix(x, square=True)
        return float(np.max(np.abs(m - self.element(self.coords(m))), initial=0.0))

    def contains(self, x, tol: Optional[float] = None) -> bool:
        tol = self.tol if tol is None else tol
        m = as_cmatrix(x, square=True)
        return self.residual(m) <= tol * max(1.0, operator_norm(m))

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return scale * self.element(c) / np.sqrt(2.0 * self.n)


def as_subspace(space) -> MatrixSubspace:
    if isinstance(space, MatrixSubspace):
        return space
    return MatrixSubspace(space)


class LinearMapOnAlgebra:
    """Linear map ``T: A -> M_n`` given by the images of a basis of ``A``.

    Parameters
    ----------
    domain : subspace or basis array
        The algebra ``A``.
    images : array, shape (dim A, n, n)
        ``T`` applied to each domain basis element.
    d_basis : array, optional
        Basis of the range algebra ``D`` used for the module checks.
    """

    def __init__(self, domain, images, d_basis=None, name: str = ""):
        self.domain = as_subspace(domain)
        self.images = np.asarray(images, dtype=np.complex128)
        if self.images.shape[0] != self.domain.dim:
            raise DimensionMismatch("one image per domain basis element is required")
        self.d_basis = None if d_basis is None else _as_basis(d_basis)
        self.name = name

    @classmethod
    def from_function(cls, domain, f: Callable[[np.ndarray], np.ndarray], d_basis=None, name: str = ""):
        dom = as_subspace(domain)
        return cls(dom, np.array([f(e) for e in dom.basis()]), d_basis, name)

    @property
    def n(self) -> int:
        return self.domain.n

    def coefficient_matrix(self) -> np.ndarray:
        """Matrix of ``T`` from domain coordinates to vectorized outputs."""
        return self.images.reshape(self.domain.dim, -1).T

    def __call__(self, x, check: bool = True) -> np.ndarray:
        m = as_cmatrix(x, square=True)
        if check and not self.domain.contains(m):
            raise NotInSubalgebra(f"input is {self.domain.residual(m):.3e} away from the domain")
        return np.tensordot(self.domain.coords(m), self.images, axes=1)

    def unital_residual(self) -> float:
        return operator_norm(self(np.eye(self.n)) - np.eye(self.n))

    def is_unital(self, tol: float = 1e-10) -> bool:
        return self.unital_residual() <= tol

    def bimodule_residual(self) -> float:
        """``max ||T(de) - dT(e)||, ||T(ed) - T(e)d||`` over basis pairs."""
        if self.d_basis is None:
            raise DimensionMismatch("range algebra basis not supplied")
        worst = 0.0
        for d in self.d_basis:
            for e, te in zip(self.domain.basis(), self.images):
                worst = max(worst, operator_norm(self(d @ e, check=False) - d @ te),
                            operator_norm(self(e @ d, check=False) - te @ d))
        return worst

    def idempotent_residual(self) -> float:
        """``max ||T(d) - d||`` over the range basis."""
        if self.d_basis is None:
            raise DimensionMismatch("range algebra basis not supplied")
        return max(operator_norm(self(d) - d) for d in self.d_basis)

    def range_residual(self) -> float:
        """Distance of the images from span(D)."""
        if self.d_basis is None:
            raise DimensionMismatch("range algebra basis not supplied")
        rng_space = MatrixSubspace(self.d_basis)
        return max(rng_space.residual(t) for t in self.images)

    def trace_preservation_residual(self, tau) -> float:
        return max(abs(tau(t) - tau(e)) for e, t in zip(self.domain.basis(), self.images))
