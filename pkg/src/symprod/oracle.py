"""Independent verification tools and a randomized witness search.

``search_sym3`` hunts for a symmetry ``J`` making the spectrum of ``V @ J``
closed under conjugation -- the certificate that ``V`` is a product of three
symmetries -- by random restarts plus coordinate descent over the conjugating
frame of ``J``.  The objective is the *pairing defect*: the total greedy
matching distance between the non-real eigenvalues and their conjugates,
which vanishes exactly on members.  A found witness is returned as a
verified three-factor splitting; absence of a witness proves nothing.

This module never reuses the constructive machinery's block formulas, so its
successes are independent evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numlin, symfactor
from .numlin import dagger, eye, frob
from .symfactor import SymmetryFactorization, _residuals_against

DEFECT_SUCCESS = 1e-6
_REAL_TOL = 1e-7


def haar_unitary(d: int, seed) -> np.ndarray:
    """Haar-distributed unitary via modified Gram-Schmidt on a complex
    Gaussian matrix, with the triangular diagonal phase-fixed positive."""
    rng = np.random.default_rng(seed)
    return _haar_from_rng(d, rng)


def _haar_from_rng(d: int, rng: np.random.Generator) -> np.ndarray:
    # Gram-Schmidt leaves the triangular diagonal real positive, which is the
    # phase convention that makes the resulting Q Haar-distributed
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2.0)
    q = np.zeros((d, d), dtype=np.complex128)
    for j in range(d):
        v = z[:, j].copy()
        for _ in range(2):
            for i in range(j):
                v -= np.vdot(q[:, i], v) * q[:, i]
        nv = math.sqrt(float((np.abs(v) ** 2).sum()))
        while nv < 1e-12:  # essentially impossible, but stay well-defined
            v = (rng.normal(size=d) + 1j * rng.normal(size=d)) / math.sqrt(2.0)
            for i in range(j):
                v -= np.vdot(q[:, i], v) * q[:, i]
            nv = math.sqrt(float((np.abs(v) ** 2).sum()))
        q[:, j] = v / nv
    return q


def random_symmetry(d: int, plus_rank: int, seed) -> np.ndarray:
    """Seeded random symmetry with ``plus_rank`` eigenvalues ``+1``.

    Deterministic: the same seed yields bitwise-identical output.
    """
    if not 0 <= plus_rank <= d:
        raise ValueError("plus_rank must lie in [0, d]")
    q = haar_unitary(d, seed)
    signs = np.array([1.0] * plus_rank + [-1.0] * (d - plus_rank))
    return q @ (signs[:, None] * dagger(q))


@dataclass
class VerificationReport:
    hermitian_residuals: list[float]
    involution_residuals: list[float]
    product_residual: float
    tol: float

    @property
    def ok(self) -> bool:
        worst = max(self.hermitian_residuals + self.involution_residuals
                    + [self.product_residual])
        return worst <= self.tol


def verify_factorization(target, factors, tol: float) -> VerificationReport:
    """Per-factor involution residuals plus the product residual, gated at
    ``tol``."""
    target = numlin.as_matrix(target)
    mats = [numlin.as_matrix(f) for f in factors]
    for f in mats:
        if f.shape != target.shape:
            raise ValueError("factor dimensions do not match the target")
    res = _residuals_against(target, mats)
    return VerificationReport(res.hermitian, res.involution, res.product, tol)


# ---------------------------------------------------------------------------
# pairing defect
# ---------------------------------------------------------------------------


def pairing_defect_of_eigenvalues(lam: np.ndarray) -> float:
    """Greedy sorted-angle matching distance between the non-real eigenvalues
    and their conjugates.  Zero exactly when the multiset is closed under
    conjugation; eigenvalues at ``+-1`` are unconstrained."""
    lam = np.asarray(lam, dtype=np.complex128)
    keep = (np.abs(lam - 1.0) > _REAL_TOL) & (np.abs(lam + 1.0) > _REAL_TOL)
    z = lam[keep]
    if z.size == 0:
        return 0.0
    a = z[np.argsort(np.mod(np.angle(z), 2.0 * math.pi), kind="stable")]
    c = np.conj(z)
    b = c[np.argsort(np.mod(np.angle(c), 2.0 * math.pi), kind="stable")]
    return float(np.abs(a - b).sum())


def pairing_defect(u, tol: float = numlin.DEFAULT_TOL) -> float:
    """Pairing defect of a unitary matrix (robust eigensolver path)."""
    return pairing_defect_of_eigenvalues(numlin.unitary_eig(u, tol).eigenvalues)


def _char_poly(a: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients (Faddeev-LeVerrier)."""
    d = a.shape[0]
    coeffs = np.empty(d + 1, dtype=np.complex128)
    coeffs[0] = 1.0
    m = np.zeros_like(a)
    ident = np.eye(d)
    c = 1.0 + 0.0j
    for k in range(1, d + 1):
        m = a @ m + c * ident
        c = -(a * m.T).sum() / k  # tr(A @ M) without the matmul
        coeffs[k] = c
    return coeffs


def _roots_on_circle(coeffs: np.ndarray) -> np.ndarray:
    """Durand-Kerner roots of a monic polynomial whose roots sit on (or very
    near) the unit circle."""
    d = len(coeffs) - 1
    z = np.exp(2j * math.pi * (np.arange(d) / d) + 0.35j)
    for _ in range(60):
        pz = np.polyval(coeffs, z)
        diff = z[:, None] - z[None, :] + np.eye(d)
        dz = pz / np.prod(diff, axis=1)
        z = z - dz
        if np.max(np.abs(dz)) < 1e-13:
            break
    return z


def _fast_defect(s: np.ndarray) -> float:
    return pairing_defect_of_eigenvalues(_roots_on_circle(_char_poly(s)))


# ---------------------------------------------------------------------------
# the search itself
# ---------------------------------------------------------------------------


def _plus_rank_schedule(d: int) -> list[int]:
    """Balanced signatures first (trace 0 or 1), then fan out."""
    order = []
    base = (d + 1) // 2
    offsets = [0]
    for k in range(1, d + 1):
        offsets.extend([-k, k])
    for off in offsets:
        p = base + off
        if 0 <= p <= d and p not in order:
            order.append(p)
    return order


def _descend(v: np.ndarray, signs: np.ndarray, rng: np.random.Generator,
             max_evals: int, objective, q0: np.ndarray | None = None,
             step: float = 0.5) -> tuple[float, np.ndarray]:
    """Coordinate descent over the conjugating frame of ``J = Q S Q*``.

    Moves are random plane rotations of two columns of ``Q``; each proposed
    plane is line-searched over a handful of amplitudes within the current
    trust step, which anneals from ``step`` down to 1e-3.
    """
    d = v.shape[0]
    q = _haar_from_rng(d, rng) if q0 is None else q0.copy()

    cur = objective(q)
    evals = 1
    fails = 0
    amplitudes = np.array([-1.0, -0.45, 0.45, 1.0])
    while evals < max_evals and cur > 1e-10:
        i = int(rng.integers(d))
        j = int(rng.integers(d - 1))
        if j >= i:
            j += 1
        phase = math.tau * rng.random()
        best_t = 0.0
        best_val = cur
        lo, hi = -step, step
        for _ in range(3):  # shrink the bracket around the best amplitude
            ts = 0.5 * (lo + hi) + 0.5 * (hi - lo) * amplitudes
            for t in ts:
                qc = q.copy()
                _rotate_columns(qc, i, j, t, phase)
                val = objective(qc)
                evals += 1
                if val < best_val:
                    best_val = val
                    best_t = t
            span = 0.5 * (hi - lo) * 0.45
            lo, hi = best_t - span, best_t + span
            if best_val >= cur:
                break
        if best_val < cur - 1e-15:
            _rotate_columns(q, i, j, best_t, phase)
            cur = best_val
            fails = 0
        else:
            fails += 1
            if fails >= 4:
                fails = 0
                step *= 0.55
                if step < 1e-3:
                    break
    return cur, q


def _rotate_columns(q: np.ndarray, i: int, j: int, t: float, phase: float) -> None:
    c = math.cos(t)
    s = math.sin(t)
    w = complex(math.cos(phase), math.sin(phase))
    ci = q[:, i].copy()
    cj = q[:, j].copy()
    q[:, i] = c * ci + s * np.conj(w) * cj
    q[:, j] = -s * w * ci + c * cj


def search_sym3(v, iters: int = 500, seed=0) -> SymmetryFactorization | None:
    """Randomized search for a three-symmetry factorization of ``V``.

    Restarts (at most ``iters``) draw a signature and a Haar frame, then
    descend on the pairing defect of ``spec(V @ J)``.  On success the
    conjugate-paired product ``V @ J`` splits into two symmetries and the
    verified factorization ``[J1, J2, J]`` is returned; ``None`` means no
    witness was found, never that none exists.
    """
    v = numlin.as_matrix(v)
    d = v.shape[0]
    if numlin.unitarity_defect(v) > 1e-9:
        raise numlin.NotUnitaryError("search_sym3 needs a unitary input")
    schedule = _plus_rank_schedule(d)

    def fast_obj(signs):
        def f(qm):
            return _fast_defect(v @ (qm * signs) @ dagger(qm))
        return f

    def precise_obj(signs):
        def f(qm):
            return pairing_defect(v @ (qm * signs) @ dagger(qm))
        return f

    for restart in range(iters):
        rng = np.random.default_rng([_as_seed(seed), restart])
        plus = schedule[restart % len(schedule)]
        signs = np.array([1.0] * plus + [-1.0] * (d - plus))
        defect, q = _descend(v, signs, rng, max_evals=420,
                             objective=fast_obj(signs))
        if defect > 2e-4:
            continue
        j = q @ (signs[:, None] * dagger(q))
        precise = pairing_defect(v @ j)
        if precise > 1e-8:
            # the fast eigenvalues smear multiple roots; polish on the
            # robust objective from where we stand
            precise, q = _descend(v, signs, rng, max_evals=240,
                                  objective=precise_obj(signs), q0=q, step=0.01)
            j = q @ (signs[:, None] * dagger(q))
        if precise > DEFECT_SUCCESS:
            continue
        z = v @ j
        try:
            j1, j2 = symfactor.sym2_factor(z, tol=1e-8, match_tol=1e-4)
        except symfactor.NotSym2Error:
            continue
        factors = [j1, j2, j]
        res = _residuals_against(v, factors)
        if res.product > DEFECT_SUCCESS:
            continue
        conj = numlin.unitary_eig(v).basis
        return SymmetryFactorization(factors, conj, list(range(d)), res)
    return None


def _as_seed(seed) -> int:
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    return int(np.random.SeedSequence(seed).entropy)
