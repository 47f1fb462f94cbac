"""Symmetry predicates and block normal forms.

A *symmetry* is a unitary ``J`` with ``J = J* = J^{-1}``; its spectrum lives
in ``{-1, +1}``.  Relative to a two-way splitting of the space every symmetry
acquires a standard block form

    ``D1  (+)  [[M, N], [N, -M]]  (+)  D2``

with ``D1, D2`` diagonal with entries ``+-1``, ``M`` real diagonal with
entries in ``(-1, 1)`` and ``N = sqrt(I - M^2) > 0``.  This module computes
that form, rebalances two- and three-factor products so the trailing factors
have trace 0 or 1, and symmetrises the diagonal corners of an arbitrary
unitary by one-sided rotations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numlin
from .numlin import dagger, eye, frob

#: |eigenvalue| above this threshold counts as a +-1 eigenvalue of a corner
PM_ONE_THRESHOLD = 1.0 - 1e-7

_LADDER_SEED = 20260810  # seeds the perturbation ladder; fixed for determinism


class NotASymmetryError(ValueError):
    """Input fails the symmetry predicate."""


class SplitMismatchError(ValueError):
    """Splitting dimensions do not add up to the matrix dimension."""


class NonIntegerTraceError(ValueError):
    """A symmetry trace strayed from the integers: numerical corruption."""


class NotSym2Error(ValueError):
    """Spectrum is not closed under conjugation, so not a two-factor product."""


class SymmetrizationFailedError(RuntimeError):
    """Corner symmetrisation failed even after the perturbation ladder."""


def is_symmetry(j, tol: float = 1e-8) -> bool:
    """True iff ``J`` is self-adjoint and involutive within ``tol``."""
    j = numlin.as_matrix(j)
    d = j.shape[0]
    return frob(j - dagger(j)) <= tol and frob(j @ j - eye(d)) <= tol


def trace_of_symmetry(j) -> int:
    """Signature of a symmetry: its trace, which must be an integer."""
    j = numlin.as_matrix(j)
    if not is_symmetry(j, 1e-8):
        raise NotASymmetryError("trace_of_symmetry needs a symmetry input")
    tr = complex(np.trace(j))
    n = round(tr.real)
    if abs(tr.real - n) > 1e-7 or abs(tr.imag) > 1e-7:
        raise NonIntegerTraceError(f"symmetry trace {tr} is not an integer")
    return int(n)


@dataclass
class StandardDecomposition:
    """Block normal form of a symmetry relative to a split ``(d1, d2)``.

    ``dims = (r1, r2, s2)`` with ``r1 + 2*r2 + s2 = d``.  ``basis`` maps input
    coordinates to canonical coordinates (rows are the canonical vectors), so
    ``basis* @ block_matrix() @ basis`` reconstructs the input.
    """

    dims: tuple[int, int, int]
    d1: np.ndarray
    d2: np.ndarray
    m: np.ndarray
    n: np.ndarray
    basis: np.ndarray

    def block_matrix(self) -> np.ndarray:
        r1, r2, s2 = self.dims
        d = r1 + 2 * r2 + s2
        out = np.zeros((d, d), dtype=np.complex128)
        for i in range(r1):
            out[i, i] = self.d1[i]
        for j in range(r2):
            a = r1 + 2 * j
            b = a + 1
            out[a, a] = self.m[j]
            out[a, b] = self.n[j]
            out[b, a] = self.n[j]
            out[b, b] = -self.m[j]
        for i in range(s2):
            k = r1 + 2 * r2 + i
            out[k, k] = self.d2[i]
        return out

    def reconstruct(self) -> np.ndarray:
        return dagger(self.basis) @ self.block_matrix() @ self.basis


def _corner_eig(corner: np.ndarray, tol: float):
    """Eigenpairs of a Hermitian corner split into +-1 part and interior part."""
    if corner.shape[0] == 0:
        z = np.zeros((0, 0), dtype=np.complex128)
        return np.zeros(0), z, np.zeros(0), z
    r = numlin.hermitian_eig(0.5 * (corner + dagger(corner)), max(tol, 1e-9))
    big = np.abs(r.eigenvalues) > PM_ONE_THRESHOLD
    pm_vals = np.sign(r.eigenvalues[big])
    order = np.argsort(-pm_vals, kind="stable")  # +1 entries first
    pm_vecs = r.basis[:, big][:, order]
    pm_vals = pm_vals[order]
    interior_vals = r.eigenvalues[~big]
    interior_vecs = r.basis[:, ~big]
    return pm_vals, pm_vecs, interior_vals, interior_vecs


def standard_decomposition(j, split: tuple[int, int], tol: float = 1e-8) -> StandardDecomposition:
    """Standard block form of a symmetry relative to ``C^d = C^d1 (+) C^d2``."""
    j = numlin.as_matrix(j)
    d = j.shape[0]
    d1, d2 = split
    if d1 < 0 or d2 < 0 or d1 + d2 != d:
        raise SplitMismatchError(f"split {split} does not partition dimension {d}")
    if not is_symmetry(j, tol):
        raise NotASymmetryError("standard_decomposition needs a symmetry input")

    j1 = j[:d1, :d1]
    j4 = j[d1:, d1:]
    dvals1, p1, _, q1 = _corner_eig(j1, tol)
    dvals2, p2, _, q2 = _corner_eig(j4, tol)
    r1 = p1.shape[1]
    s2 = p2.shape[1]
    r2 = q1.shape[1]
    if q2.shape[1] != r2:
        raise NotASymmetryError(
            f"interior corner ranks disagree ({r2} vs {q2.shape[1]}); "
            "eigenvalues sit too close to the +-1 threshold"
        )

    basis_cols = np.zeros((d, d), dtype=np.complex128)
    col = 0
    for i in range(r1):
        basis_cols[:d1, col] = p1[:, i]
        col += 1
    mvec = np.zeros(r2)
    nvec = np.zeros(r2)
    if r2:
        corner = dagger(q1) @ j[:d1, d1:] @ q2
        v0, npos = numlin.polar(corner)
        m0 = dagger(v0) @ (dagger(q1) @ j1 @ q1) @ v0
        rm = numlin.hermitian_eig(0.5 * (m0 + dagger(m0)), max(tol, 1e-9))
        mvec = rm.eigenvalues
        b = rm.basis
        ndiag = dagger(b) @ npos @ b
        nvec = np.real(np.diag(ndiag)).copy()
        a1 = q1 @ v0 @ b
        a2 = q2 @ b
        for jdx in range(r2):
            basis_cols[:d1, col] = a1[:, jdx]
            basis_cols[d1:, col + 1] = a2[:, jdx]
            col += 2
    for i in range(s2):
        basis_cols[d1:, col] = p2[:, i]
        col += 1

    return StandardDecomposition(
        dims=(r1, r2, s2),
        d1=dvals1,
        d2=dvals2,
        m=mvec,
        n=nvec,
        basis=dagger(basis_cols),
    )


def _expm_skew(h: np.ndarray, eps: float) -> np.ndarray:
    """exp(i * eps * H) for Hermitian H."""
    r = numlin.hermitian_eig(h)
    phases = np.exp(1j * eps * r.eigenvalues)
    return r.basis @ (phases[:, None] * dagger(r.basis))


def symmetrize_corners(u, split: tuple[int, int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One-sided rotations ``X = X1 (+) I`` and ``Z = I (+) Z4`` making
    ``Y = X @ U @ Z`` a symmetry.

    ``X`` absorbs the unitary polar factor of the (1,1) corner, ``Z`` the
    negated polar factor of the (2,2) corner.  Singular corners are handled by
    recomputing the rotations from ``U Â· exp(eps G)`` for seeded skew-Hermitian
    ``G`` over a descending ladder of ``eps``; ``Y`` is always formed from the
    original ``U``, so ``X* Y Z* == U`` holds exactly.
    """
    u = numlin.as_matrix(u)
    d = u.shape[0]
    d1, d2 = split
    if d1 < 0 or d2 < 0 or d1 + d2 != d:
        raise SplitMismatchError(f"split {split} does not partition dimension {d}")
    if numlin.unitarity_defect(u) > 1e-9:
        raise numlin.NotUnitaryError("symmetrize_corners needs a unitary input")

    def build(source: np.ndarray):
        r1, _ = numlin.polar(source[:d1, :d1])
        r4, _ = numlin.polar(source[d1:, d1:])
        x = eye(d)
        x[:d1, :d1] = dagger(r1)
        z = eye(d)
        z[d1:, d1:] = -dagger(r4)
        y = x @ u @ z
        return x, z, y

    x, z, y = build(u)
    if is_symmetry(y, 1e-6):
        return x, z, y

    best = None
    eps = 1e-4
    for attempt in range(6):
        rng = np.random.default_rng([_LADDER_SEED, attempt])
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        h = 0.5 * (g + dagger(g))
        x, z, y = build(u @ _expm_skew(h, eps))
        resid = frob(y @ y - eye(d)) + frob(y - dagger(y))
        if best is None or resid < best[0]:
            best = (resid, x, z, y)
        eps /= 10.0
    _, x, z, y = best
    if not is_symmetry(y, 1e-6):
        raise SymmetrizationFailedError(
            "corner symmetrisation failed after 6 perturbation retries"
        )
    return x, z, y


@dataclass
class OrbitDecomposition:
    """Splitting ``U = G @ S`` with ``G`` commuting with a reference normal
    matrix and ``S`` a symmetry (or a product of two, listed in ``parts``)."""

    commutant_factor: np.ndarray
    symmetry_factor: np.ndarray
    parts: tuple[np.ndarray, ...]
    residual: float


def _pair_conjugate_spectrum(eigenvalues: np.ndarray, match_tol: float):
    """Greedy pairing of the non-real eigenvalues with their conjugates.

    Returns ``(ok, pairs, reals)`` where ``pairs`` are index pairs into
    ``eigenvalues`` (each pair ``(i, j)`` satisfies ``conj(lam_i) ~= lam_j``)
    and ``reals`` are ``(index, +-1)`` entries for eigenvalues at ``+-1``.
    """
    reals = []
    nonreal = []
    for i, lam in enumerate(eigenvalues):
        if abs(lam - 1.0) <= match_tol:
            reals.append((i, 1))
        elif abs(lam + 1.0) <= match_tol:
            reals.append((i, -1))
        else:
            nonreal.append(i)
    ang = np.mod(np.angle(eigenvalues[nonreal]), 2.0 * np.pi)
    order = np.argsort(ang, kind="stable")
    idx = [nonreal[k] for k in order]
    k = len(idx)
    pairs = []
    ok = True
    for a in range(k // 2):
        b = k - 1 - a
        i, j = idx[a], idx[b]
        if abs(np.conj(eigenvalues[i]) - eigenvalues[j]) > match_tol:
            ok = False
        pairs.append((i, j))
    if k % 2 == 1:
        # the middle element would have to be its own conjugate, i.e. real
        mid = idx[k // 2]
        lam = eigenvalues[mid]
        if abs(lam.imag) <= match_tol:
            reals.append((mid, 1 if lam.real > 0 else -1))
        else:
            ok = False
            pairs.append((mid, mid))
    return ok, pairs, reals


def _prop_factor_blocks(eigenvalues, basis, pairs, reals):
    """Assemble the two symmetry factors of a conjugation-closed unitary from
    its eigendecomposition: swap blocks on conjugate pairs, signs on reals."""
    d = basis.shape[0]
    k1 = np.zeros((d, d), dtype=np.complex128)
    k2 = np.zeros((d, d), dtype=np.complex128)
    for i, j in pairs:
        va = basis[:, i]
        vb = basis[:, j]
        alpha = eigenvalues[i] + np.conj(eigenvalues[j])
        alpha = alpha / abs(alpha) if abs(alpha) > 1e-13 else eigenvalues[i]
        k1 += alpha * np.outer(va, vb.conj()) + np.conj(alpha) * np.outer(vb, va.conj())
        k2 += np.outer(va, vb.conj()) + np.outer(vb, va.conj())
    for i, sign in reals:
        v = basis[:, i]
        k1 += sign * np.outer(v, v.conj())
        k2 += np.outer(v, v.conj())
    return k1, k2


def rebalance(j1, j2) -> tuple[np.ndarray, np.ndarray]:
    """Rewrite a product of two symmetries so the second one is balanced.

    ``K1 @ K2 == J1 @ J2`` with ``trace(K2)`` in ``{0, 1}``.  Conjugate
    eigenvalue pairs of the product become swap-type blocks; the leftover
    ``+-1`` tail is split as evenly as possible.
    """
    j1 = numlin.as_matrix(j1)
    j2 = numlin.as_matrix(j2)
    for j in (j1, j2):
        if not is_symmetry(j, 1e-8):
            raise NotASymmetryError("rebalance needs symmetry inputs")
    v = j1 @ j2
    er = numlin.unitary_eig(v)
    ok, pairs, reals = _pair_conjugate_spectrum(er.eigenvalues, 1e-7)
    if not ok:
        raise NotSym2Error("product spectrum is not closed under conjugation")

    plus = [i for i, s in reals if s == 1]
    minus = [i for i, s in reals if s == -1]
    mixed = list(zip(plus, minus))
    tail = plus[len(mixed):] + minus[len(mixed):]
    xi = 1 if len(plus) > len(mixed) else -1

    d = v.shape[0]
    k1 = np.zeros((d, d), dtype=np.complex128)
    k2 = np.zeros((d, d), dtype=np.complex128)
    b = er.basis
    # non-real conjugate pairs: K = [[0, a], [conj(a), 0]], L = flip
    kp, lp = _prop_factor_blocks(er.eigenvalues, b, pairs, [])
    k1 += kp
    k2 += lp
    # (+1, -1) pairs: K = I, L = diag(1, -1)
    for ip, im in mixed:
        vp = b[:, ip]
        vm = b[:, im]
        k1 += np.outer(vp, vp.conj()) + np.outer(vm, vm.conj())
        k2 += np.outer(vp, vp.conj()) - np.outer(vm, vm.conj())
    # xi * I_q tail: K = xi * ((I_a (+) -I_a) (+) I_b), L the same without xi
    q = len(tail)
    a = q // 2
    for pos, i in enumerate(tail):
        proj = np.outer(b[:, i], b[:, i].conj())
        lsign = -1 if a <= pos < 2 * a else 1
        k1 += xi * lsign * proj
        k2 += lsign * proj
    return k1, k2


def rebalance3(j1, j2, j3) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rewrite a product of three symmetries so the last two are balanced."""
    q2, k3 = rebalance(j2, j3)
    k1, k2 = rebalance(numlin.as_matrix(j1), q2)
    return k1, k2, k3
