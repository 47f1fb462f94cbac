"""Dense complex linear algebra built from scratch.

Everything downstream rests on four primitives implemented here without an
external eigensolver or SVD backend (numpy supplies array arithmetic only):

* ``hermitian_eig`` -- cyclic Jacobi on complex Hermitian matrices,
* ``unitary_eig``   -- joint diagonalisation of the commuting Hermitian pair
  ``(U + U*)/2`` and ``(U - U*)/(2i)``,
* ``svd`` / ``polar`` -- singular values via ``hermitian_eig`` of ``A*A``,
* ``det``           -- eigenvalue product for unitaries, LU otherwise.

All functions are pure; matrices are square ``numpy.complex128`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9
#: gap on the eigenvalues of (U+U*)/2 below which eigenspaces are treated as
#: one cluster and separated by the skew part instead
CLUSTER_GAP = 1e-8


class NotHermitianError(ValueError):
    """Input fails the Hermitian precondition."""


class NotUnitaryError(ValueError):
    """Input fails the unitarity precondition."""


class NoConvergenceError(RuntimeError):
    """Jacobi sweep cap reached before the off-diagonal mass died."""


def as_matrix(a) -> np.ndarray:
    """Validate and convert to a square complex128 array."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.size and not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix entries must be finite")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def frob(a: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.sqrt((np.abs(a) ** 2).sum()))


def eye(d: int) -> np.ndarray:
    return np.eye(d, dtype=np.complex128)


def unitarity_defect(u: np.ndarray) -> float:
    return frob(dagger(u) @ u - eye(u.shape[0]))


@dataclass
class EigenResult:
    """Eigendecomposition ``A @ basis == basis @ diag(eigenvalues)``.

    ``basis`` columns are orthonormal eigenvectors; ``residual`` is the
    Frobenius norm of the reconstruction defect above.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray
    residual: float


def _off_mass(w: np.ndarray) -> float:
    d = w.shape[0]
    off = w - np.diag(np.diag(w))
    return frob(off)


def hermitian_eig(a, tol: float = DEFAULT_TOL) -> EigenResult:
    """Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi.

    Eigenvalues are real and sorted ascending.  Sweeps run until the
    off-diagonal Frobenius mass is negligible, capped at ``30 * d**2``
    rotations.
    """
    a = as_matrix(a)
    d = a.shape[0]
    if d == 0:
        return EigenResult(np.zeros(0), np.zeros((0, 0), dtype=np.complex128), 0.0)
    scale = frob(a)
    if frob(a - dagger(a)) > tol * max(scale, 1.0):
        raise NotHermitianError(f"matrix is not Hermitian within {tol:g}")
    w = 0.5 * (a + dagger(a))
    v = eye(d)
    if d > 1:
        # aim well below the contract tolerance; quadratic convergence makes
        # the final sweep overshoot, which the reconstruction residual needs
        target = max(scale, 1.0) * min(tol, 1e-14)
        pivot_eps = target / (d * d)
        max_rotations = 30 * d * d
        rotations = 0
        while True:
            rotated = False
            for p in range(d - 1):
                for q in range(p + 1, d):
                    apq = w[p, q]
                    absb = abs(apq)
                    if absb <= pivot_eps:
                        continue
                    app = w[p, p].real
                    aqq = w[q, q].real
                    phase = apq / absb
                    theta = (aqq - app) / (2.0 * absb)
                    t = 1.0 / (abs(theta) + math.sqrt(1.0 + theta * theta))
                    if theta < 0.0:
                        t = -t
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    # two-sided rotation on the (p, q) plane with the phase of
                    # the pivot absorbed into column q
                    cq = np.conj(phase)
                    colp = w[:, p].copy()
                    colq = w[:, q].copy()
                    w[:, p] = c * colp - cq * s * colq
                    w[:, q] = s * colp + cq * c * colq
                    rowp = w[p, :].copy()
                    rowq = w[q, :].copy()
                    w[p, :] = c * rowp - phase * s * rowq
                    w[q, :] = s * rowp + phase * c * rowq
                    w[p, q] = 0.0
                    w[q, p] = 0.0
                    w[p, p] = w[p, p].real
                    w[q, q] = w[q, q].real
                    vcp = v[:, p].copy()
                    vcq = v[:, q].copy()
                    v[:, p] = c * vcp - cq * s * vcq
                    v[:, q] = s * vcp + cq * c * vcq
                    rotated = True
                    rotations += 1
            if not rotated or _off_mass(w) <= target:
                break
            if rotations >= max_rotations:
                if _off_mass(w) > tol * max(scale, 1.0):
                    raise NoConvergenceError(
                        f"Jacobi did not converge in {max_rotations} rotations"
                    )
                break
    eigenvalues = np.real(np.diag(w)).copy()
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    basis = v[:, order]
    residual = frob(a @ basis - basis * eigenvalues)
    return EigenResult(eigenvalues, basis, residual)


def _cluster_indices(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Split sorted real values into clusters separated by more than ``gap``."""
    if values.size == 0:
        return []
    clusters = []
    start = 0
    for i in range(1, values.size):
        if values[i] - values[i - 1] > gap:
            clusters.append(np.arange(start, i))
            start = i
    clusters.append(np.arange(start, values.size))
    return clusters


def normal_eig(a, tol: float = DEFAULT_TOL) -> EigenResult:
    """Eigendecomposition of a normal matrix.

    Diagonalises the Hermitian part, then the skew part restricted to each
    eigenspace of the Hermitian part (the two commute exactly when the input
    is normal).  Eigenvalues sorted by (real, imag).
    """
    a = as_matrix(a)
    d = a.shape[0]
    h = 0.5 * (a + dagger(a))
    k = (a - dagger(a)) / 2j
    rh = hermitian_eig(h, tol)
    basis = rh.basis.copy()
    for idx in _cluster_indices(rh.eigenvalues, CLUSTER_GAP):
        if idx.size <= 1:
            continue
        b = basis[:, idx]
        kc = dagger(b) @ k @ b
        kc = 0.5 * (kc + dagger(kc))
        rk = hermitian_eig(kc, max(tol, 1e-9))
        basis[:, idx] = b @ rk.basis
    ray = np.einsum("ij,ik,kj->j", basis.conj(), a, basis)
    order = np.lexsort((ray.imag, ray.real))
    eigenvalues = ray[order]
    basis = basis[:, order]
    residual = frob(a @ basis - basis * eigenvalues)
    return EigenResult(eigenvalues, basis, residual)


def unitary_eig(u, tol: float = DEFAULT_TOL) -> EigenResult:
    """Eigendecomposition of a unitary matrix; eigenvalues sorted by angle.

    All eigenvalues lie on the unit circle within ``10 * tol``.
    """
    u = as_matrix(u)
    if unitarity_defect(u) > tol:
        raise NotUnitaryError(f"matrix is not unitary within {tol:g}")
    r = normal_eig(u, tol)
    moduli = np.abs(r.eigenvalues)
    if r.eigenvalues.size and np.max(np.abs(moduli - 1.0)) > 10 * tol:
        raise NoConvergenceError("recovered eigenvalues left the unit circle")
    ang = np.mod(np.angle(r.eigenvalues), 2.0 * np.pi)
    order = np.argsort(ang, kind="stable")
    return EigenResult(r.eigenvalues[order], r.basis[:, order], r.residual)


def _orthonormal_completion(filled: np.ndarray, candidates: np.ndarray, need: int) -> np.ndarray:
    """Extend the orthonormal columns of ``filled`` by ``need`` more, drawn
    from ``candidates`` (and the standard basis as a fallback)."""
    d = filled.shape[0]
    cols = [filled[:, j] for j in range(filled.shape[1])]
    out = []
    pool = [candidates[:, j] for j in range(candidates.shape[1])]
    pool += [eye(d)[:, j] for j in range(d)]
    for cand in pool:
        if len(out) == need:
            break
        v = cand.astype(np.complex128).copy()
        for _ in range(2):  # re-orthogonalise for stability
            for b in cols:
                v = v - (np.vdot(b, v)) * b
        nv = math.sqrt(float((np.abs(v) ** 2).sum()))
        if nv > 0.3:
            v = v / nv
            cols.append(v)
            out.append(v)
    if len(out) != need:
        raise NoConvergenceError("failed to complete an orthonormal basis")
    return np.column_stack(out) if out else np.zeros((d, 0), dtype=np.complex128)


def svd(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular value decomposition ``A = L @ diag(s) @ R*`` of a square matrix.

    Singular values descend; ``L`` and ``R`` are unitary.  Computed from the
    Hermitian eigenproblems of ``A*A`` and ``AA*``; for (near) singular input
    the left factor is completed to a unitary from the ``AA*`` eigenvectors.
    """
    a = as_matrix(a)
    d = a.shape[0]
    if d == 0:
        z = np.zeros((0, 0), dtype=np.complex128)
        return z, np.zeros(0), z
    gram = dagger(a) @ a
    gram = 0.5 * (gram + dagger(gram))
    r = hermitian_eig(gram)
    order = np.argsort(r.eigenvalues, kind="stable")[::-1]
    s = np.sqrt(np.clip(r.eigenvalues[order], 0.0, None))
    right = r.basis[:, order]
    cutoff = max(s[0], 1.0) * 1e-13 if s.size else 0.0
    left = np.zeros((d, d), dtype=np.complex128)
    big = [j for j in range(d) if s[j] > cutoff]
    for j in big:
        left[:, j] = (a @ right[:, j]) / s[j]
    small = [j for j in range(d) if s[j] <= cutoff]
    if small:
        outer = a @ dagger(a)
        outer = 0.5 * (outer + dagger(outer))
        ro = hermitian_eig(outer)
        fill = _orthonormal_completion(left[:, big], ro.basis, len(small))
        for pos, j in enumerate(small):
            left[:, j] = fill[:, pos]
    return left, s, right


def polar(a) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``A = U @ P`` with ``U`` unitary, ``P`` positive
    semidefinite (the unique positive square root of ``A*A``).

    For singular input the unitary factor is completed arbitrarily on the
    kernel; ``A = U @ P`` still holds exactly there.
    """
    left, s, right = svd(a)
    u = left @ dagger(right)
    p = right @ (s[:, None] * dagger(right))
    p = 0.5 * (p + dagger(p))
    return u, p


def det_lu(a) -> complex:
    """Determinant by LU with partial pivoting."""
    a = as_matrix(a).copy()
    d = a.shape[0]
    sign = 1.0
    for col in range(d):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[piv, col]) == 0.0:
            return 0.0 + 0.0j
        if piv != col:
            a[[col, piv], :] = a[[piv, col], :]
            sign = -sign
        a[col + 1 :, col:] -= np.outer(a[col + 1 :, col] / a[col, col], a[col, col:])
    return complex(sign * np.prod(np.diag(a)))


def det(a, tol: float = DEFAULT_TOL) -> complex:
    """Determinant: product of ``unitary_eig`` eigenvalues for unitary input,
    LU with partial pivoting otherwise."""
    a = as_matrix(a)
    if a.shape[0] == 0:
        return 1.0 + 0.0j
    if unitarity_defect(a) <= max(tol, 1e-9):
        return complex(np.prod(unitary_eig(a, max(tol, 1e-9)).eigenvalues))
    return det_lu(a)
