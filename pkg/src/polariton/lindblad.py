"""Liouvillian construction, steady states, and master-equation propagation.

The master equation is

    drho/dt = -i[H, rho] + kappa_a D[a]rho + kappa_b D[b]rho + gamma D[s-]rho,

with D[O]rho = (2 O rho O' - rho O'O - O'O rho)/2.  Density matrices are
vectorised row-major, so  vec(A rho B) = (A kron B^T) vec(rho).

The steady-state solve replaces one row of the vectorised Liouvillian with
the trace constraint and factorises the result.  Internally the system is
projected onto an orthonormal basis of Hermitian matrices, which makes it
real and roughly halves the factorisation cost; the projection is exact
(the Liouvillian preserves Hermiticity) and observationally invisible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import (IntegrationError, NonUniqueSteadyStateError, ParameterError,
                     SteadyStateError)
from .hilbert import QOperator, TruncationConfig
from .model import SystemParams, _bare_ops

#: Relative residual bound for accepted steady states, ||L rho|| <= RTOL ||L||.
STEADY_RTOL = 1e-10
#: Singular values of L below this fraction of the norm scale count as zero modes.
ZERO_MODE_RTOL = 1e-8


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state of the composite system.

    Construction stores the matrix as given (read-only); solver routines
    hermitise before constructing.  :meth:`validate` checks the numerical
    invariants explicitly.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ParameterError(f"density matrix must be square, got {mat.shape}")
        dims = tuple(self.dims) if self.dims else (mat.shape[0],)
        if int(np.prod(dims)) != mat.shape[0]:
            raise ParameterError(f"dims {dims} do not match matrix side {mat.shape[0]}")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def expect(self, op: QOperator) -> complex:
        return complex(np.einsum("ij,ji->", self.matrix, op.matrix))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[0])

    def hermiticity_defect(self) -> float:
        """Relative Frobenius distance from the Hermitian part."""
        scale = max(1.0, float(np.linalg.norm(self.matrix)))
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T)) / scale

    def validate(self, psd_tol: float = 1e-10, trace_tol: float = 1e-12,
                 herm_tol: float = 1e-12) -> "DensityMatrix":
        """Check Hermiticity, unit trace and numerical positivity; return self."""
        if self.hermiticity_defect() > herm_tol:
            raise SteadyStateError(f"not Hermitian: defect {self.hermiticity_defect():.2e}")
        if abs(self.trace() - 1.0) > trace_tol:
            raise SteadyStateError(f"trace {self.trace()!r} differs from 1")
        mineig = self.min_eigenvalue()
        if mineig < -psd_tol:
            raise SteadyStateError(f"minimum eigenvalue {mineig:.2e} below -{psd_tol:.0e}")
        return self


@dataclass
class Liouvillian:
    """Sparse superoperator of the master equation on a dim^2 space."""

    matrix: sp.csr_matrix
    dims: tuple[int, ...]
    hamiltonian: QOperator
    collapse_ops: tuple[tuple[float, QOperator], ...]

    def __post_init__(self):
        self._fro = float(np.linalg.norm(self.matrix.data)) if self.matrix.nnz else 0.0
        self._real_cache = None

    @property
    def dim(self) -> int:
        """Hilbert-space dimension (the superoperator has side dim^2)."""
        return self.hamiltonian.dim

    @property
    def norm(self) -> float:
        """Frobenius norm of the superoperator matrix."""
        return self._fro

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """L[rho] for a Hilbert-space matrix rho."""
        d = self.dim
        return (self.matrix @ np.asarray(rho, dtype=complex).reshape(-1)).reshape(d, d)

    def _real_form(self) -> sp.csr_matrix:
        """The superoperator in the orthonormal Hermitian-matrix basis (real)."""
        if self._real_cache is None:
            S = _hermitian_basis(self.dim)
            self._real_cache = (S.conj().T @ (self.matrix @ S)).real.tocsr()
        return self._real_cache


@lru_cache(maxsize=8)
def _hermitian_basis(d: int) -> sp.csc_matrix:
    """Isometry from real Hermitian coordinates to vec(rho).

    Coordinates: the d diagonal matrices E_ii first, then for each i < j the
    pair (E_ij + E_ji)/sqrt2 and i(E_ij - E_ji)/sqrt2.  The leading d
    coordinates therefore carry the trace.
    """
    rows, cols, vals = [], [], []
    k = 0
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(d):
        rows.append(i * d + i); cols.append(k); vals.append(1.0)
        k += 1
    for i in range(d):
        for j in range(i + 1, d):
            rows += [i * d + j, j * d + i]; cols += [k, k]; vals += [inv_sqrt2, inv_sqrt2]
            k += 1
            rows += [i * d + j, j * d + i]; cols += [k, k]; vals += [1j * inv_sqrt2, -1j * inv_sqrt2]
            k += 1
    return sp.csc_matrix((vals, (rows, cols)), shape=(d * d, d * d))


def _dissipator(O: sp.csr_matrix, I: sp.csr_matrix) -> sp.csr_matrix:
    OdO = (O.conj().T @ O).tocsr()
    return sp.kron(O, O.conj()) - 0.5 * (sp.kron(OdO, I) + sp.kron(I, OdO.T))


def build_liouvillian(H: QOperator, p: SystemParams) -> Liouvillian:
    """Assemble the Lindblad superoperator for H with decay channels
    sqrt(kappa_a) a, sqrt(kappa_b) b, sqrt(gamma) sigma_-.
    """
    herm_defect = np.linalg.norm(H.matrix - H.matrix.conj().T)
    if herm_defect > 1e-12 * max(1.0, H.norm()):
        raise ParameterError(f"Hamiltonian is not Hermitian (defect {herm_defect:.2e})")
    if len(H.dims) != 3 or H.dims[2] != 2:
        raise ParameterError(f"expected composite dims (photon, phonon, qubit), got {H.dims}")
    cfg = TruncationConfig(n_a_max=H.dims[0] - 1, n_b_max=H.dims[1] - 1)
    a, b, sm = _bare_ops(cfg)
    I = sp.identity(H.dim, format="csr", dtype=complex)
    Hs = sp.csr_matrix(H.matrix)
    L = (-1j * (sp.kron(Hs, I) - sp.kron(I, Hs.T))).tocsr()
    collapse = []
    for rate, op in ((p.kappa_a, a), (p.kappa_b, b), (p.gamma, sm)):
        if rate < 0:
            raise ParameterError(f"negative decay rate {rate}")
        collapse.append((float(rate), op))
        if rate > 0:
            L = L + rate * _dissipator(sp.csr_matrix(op.matrix), I)
    return Liouvillian(L.tocsr(), H.dims, H, tuple(collapse))


def _count_zero_modes(L: Liouvillian, k: int = 2) -> tuple[int, np.ndarray]:
    """Count eigenvalues of L with magnitude below the zero-mode tolerance."""
    scale = max(L.norm, 1e-300)
    sigma = 1e-6 * scale / L.dim  # small positive shift; L has no eigenvalue there
    try:
        vals = spla.eigs(L.matrix, k=k, sigma=sigma, which="LM",
                         return_eigenvectors=False)
    except Exception as exc:  # ARPACK failure on tiny/degenerate problems
        dense = L.matrix.toarray()
        vals = np.linalg.eigvals(dense)
        vals = vals[np.argsort(np.abs(vals))][:k]
        del dense, exc
    n_zero = int(np.sum(np.abs(vals) < ZERO_MODE_RTOL * scale))
    return n_zero, np.asarray(vals)


def _smallest_eigenpair(L: Liouvillian) -> np.ndarray:
    scale = max(L.norm, 1e-300)
    sigma = 1e-6 * scale / L.dim
    vals, vecs = spla.eigs(L.matrix, k=1, sigma=sigma, which="LM")
    return vecs[:, 0]


def steady_state(L: Liouvillian, check_unique: bool = True) -> DensityMatrix:
    """Solve L[rho] = 0 with Tr rho = 1.

    Replaces one row of the (Hermitian-basis) superoperator with the trace
    constraint, factorises, and verifies the residual against the full
    complex Liouvillian; falls back to a smallest-magnitude eigenpair when
    the direct solve is unsatisfactory.  A tiny-pivot screen on the
    factorisation triggers an explicit count of near-zero modes, so a
    degenerate null space raises :class:`NonUniqueSteadyStateError` instead
    of silently returning one of many steady states.
    """
    d = L.dim
    Lr = L._real_form()
    # Row 0 of the real form is the evolution of a diagonal coordinate; the
    # trace functional is the sum of the first d coordinates.
    trace_row = sp.csr_matrix((np.ones(d), (np.zeros(d, dtype=int), np.arange(d))),
                              shape=(1, d * d))
    M = sp.vstack([trace_row, Lr[1:]], format="csc")
    rhs = np.zeros(d * d)
    rhs[0] = 1.0
    suspicious = False
    rho = None
    try:
        lu = spla.splu(M)
        udiag = np.abs(lu.U.diagonal())
        if udiag.min() <= 1e-12 * udiag.max():
            suspicious = True
        x = lu.solve(rhs)
        S = _hermitian_basis(d)
        rho = (S @ x.astype(complex)).reshape(d, d)
    except RuntimeError:
        suspicious = True

    def finish(mat: np.ndarray) -> Optional[DensityMatrix]:
        mat = 0.5 * (mat + mat.conj().T)
        tr = np.trace(mat).real
        if abs(tr) < 1e-300:
            return None
        mat = mat / tr
        residual = np.linalg.norm(L.matrix @ mat.reshape(-1))
        if residual > STEADY_RTOL * max(L.norm, 1.0):
            return None
        return DensityMatrix(mat, L.dims)

    result = finish(rho) if rho is not None else None
    if result is None or suspicious:
        if check_unique or result is None:
            n_zero, _ = _count_zero_modes(L)
            if n_zero >= 2:
                raise NonUniqueSteadyStateError(
                    f"{n_zero} near-zero modes: the steady state is not unique")
            if n_zero == 0:
                raise SteadyStateError(
                    "no eigenvalue below the zero-mode tolerance; cannot converge "
                    "to a steady state")
    if result is None:
        # direct solve failed but the zero mode is unique: use the eigenpair
        vec = _smallest_eigenpair(L)
        result = finish(vec.reshape(d, d))
        if result is None:
            raise SteadyStateError("steady-state residual check failed for both the "
                                   "direct solve and the eigenpair fallback")
    mineig = result.min_eigenvalue()
    if mineig < -1e-10:
        raise SteadyStateError(f"steady state not positive: min eigenvalue {mineig:.2e}")
    return result


def _propagate(mat0: np.ndarray, L: Liouvillian, t_grid: Sequence[float]) -> list[np.ndarray]:
    """Integrate dX/dt = L[X] from t=0, returning X at the grid times."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise IntegrationError("t_grid must be a non-empty 1-d sequence")
    if t_grid[0] < 0 or np.any(np.diff(t_grid) <= 0):
        raise IntegrationError("t_grid must be increasing and start at t >= 0")
    d = L.dim
    y0 = np.asarray(mat0, dtype=complex).reshape(-1)
    if t_grid[-1] == 0.0:
        return [y0.reshape(d, d)]
    Lm = L.matrix
    sol = solve_ivp(lambda t, y: Lm @ y, (0.0, float(t_grid[-1])), y0,
                    t_eval=t_grid, method="DOP853", rtol=1e-9, atol=1e-12)
    if not sol.success:
        raise IntegrationError(f"master-equation propagation failed: {sol.message}")
    return [sol.y[:, k].reshape(d, d) for k in range(sol.y.shape[1])]


def evolve(rho0: DensityMatrix, L: Liouvillian, t_grid: Sequence[float]) -> list[DensityMatrix]:
    """Propagate a state under the master equation and sample it on a grid.

    Outputs are hermitised but deliberately not re-normalised, so trace
    drift measures integration accuracy.
    """
    if rho0.dim != L.dim:
        raise ParameterError(f"state dim {rho0.dim} does not match Liouvillian dim {L.dim}")
    mats = _propagate(rho0.matrix, L, t_grid)
    return [DensityMatrix(0.5 * (m + m.conj().T), L.dims) for m in mats]
