"""Unitary-orbit versus symmetry-orbit deciders and constructive splittings.

For a normal reference matrix ``N``, the unitary orbit ``{U* N U}`` is swept
out by symmetries alone exactly when ``N`` has at most two distinct
eigenvalues; then every unitary splits as ``U = G @ J`` with ``G`` in the
unitary commutant of ``N`` and ``J`` a symmetry.  With three or four distinct
eigenvalues a product of two symmetries suffices.  Five or more is open
territory and is refused.

The negative direction is certified by a rank obstruction: for any symmetry
``J`` and any orthogonal three-block splitting, the (1,3) and (3,1) blocks
have equal rank, while ``rank_asymmetry_witness`` produces a unitary that
breaks that balance.
"""

from __future__ import annotations

import numpy as np

from . import numlin, symcore
from .numlin import dagger, eye, frob
from .symcore import OrbitDecomposition
from .symfactor import Angle

#: absolute gap under which two eigenvalues of the reference normal matrix
#: count as the same
EIG_GAP = 1e-7
RANK_TOL = 1e-8


class WrongEigenvalueCountError(ValueError):
    pass


class TooManyEigenvaluesError(ValueError):
    """Five or more distinct eigenvalues: undecided, refuse rather than guess."""


class HypothesisFailedError(ValueError):
    """The determinant/trace preconditions of the diagonal test fail."""


def _check_normal(n: np.ndarray, tol: float) -> None:
    scale = max(frob(n) ** 2, 1.0)
    if frob(dagger(n) @ n - n @ dagger(n)) > tol * scale:
        raise ValueError("reference matrix is not normal")


def _eig_clusters(n: np.ndarray, gap: float = EIG_GAP):
    """Eigendecomposition of a normal matrix grouped into distinct-eigenvalue
    clusters (single linkage at absolute gap ``gap``)."""
    er = numlin.normal_eig(n)
    vals = er.eigenvalues
    d = vals.size
    parent = list(range(d))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(d):
        for j in range(i + 1, d):
            if abs(vals[i] - vals[j]) <= gap:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(d):
        groups.setdefault(find(i), []).append(i)
    # deterministic order: by (re, im) of the cluster mean
    clusters = sorted(groups.values(),
                      key=lambda idx: (np.mean(vals[idx]).real, np.mean(vals[idx]).imag))
    return er, clusters


def distinct_eigenvalue_count(n, tol: float = numlin.DEFAULT_TOL) -> int:
    n = numlin.as_matrix(n)
    _check_normal(n, max(tol, 1e-9))
    _, clusters = _eig_clusters(n)
    return len(clusters)


def sym1_orbit_equals_unitary(n, tol: float = numlin.DEFAULT_TOL) -> bool:
    """True iff the symmetry orbit of ``N`` is its whole unitary orbit:
    ``N`` normal with at most two distinct eigenvalues."""
    n = numlin.as_matrix(n)
    scale = max(frob(n) ** 2, 1.0)
    if frob(dagger(n) @ n - n @ dagger(n)) > tol * scale:
        return False
    _, clusters = _eig_clusters(n)
    return len(clusters) <= 2


def _grouped_basis(er, clusters) -> tuple[np.ndarray, list[int]]:
    cols = []
    sizes = []
    for idx in clusters:
        for i in idx:
            cols.append(er.basis[:, i])
        sizes.append(len(idx))
    return np.column_stack(cols), sizes


def sym1_orbit_decompose(u, n) -> OrbitDecomposition:
    """Split ``U = G @ J`` with ``G`` commuting with the two-eigenvalue normal
    matrix ``N`` and ``J`` a symmetry.

    Rotates to the eigenbasis of ``N`` and symmetrises the corners of ``U``
    there; the one-sided rotations land in the commutant.
    """
    u = numlin.as_matrix(u)
    n = numlin.as_matrix(n)
    if u.shape != n.shape:
        raise ValueError("dimension mismatch between U and N")
    _check_normal(n, 1e-9)
    er, clusters = _eig_clusters(n)
    if len(clusters) != 2:
        raise WrongEigenvalueCountError(
            f"need exactly two distinct eigenvalues, found {len(clusters)}")
    if symcore.is_symmetry(u, 1e-8):
        return OrbitDecomposition(eye(u.shape[0]), u.copy(), (u.copy(),), 0.0)
    q, sizes = _grouped_basis(er, clusters)
    up = dagger(q) @ u @ q
    x, z, y = symcore.symmetrize_corners(up, (sizes[0], sizes[1]))
    gp = dagger(x) @ dagger(z)
    jp = z @ y @ dagger(z)
    g = q @ gp @ dagger(q)
    j = q @ jp @ dagger(q)
    residual = frob(g @ j - u)
    return OrbitDecomposition(g, j, (j,), residual)


def _commutant_split(r: np.ndarray, sizes: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Split a unitary block ``R`` as (commutant of the grouped scalars) x
    (symmetry).  One cluster: the commutant is everything.  Two clusters:
    corner symmetrisation."""
    if len(sizes) == 1:
        return r.copy(), eye(r.shape[0])
    x, z, y = symcore.symmetrize_corners(r, (sizes[0], sizes[1]))
    w = dagger(x) @ dagger(z)
    j = z @ y @ dagger(z)
    return w, j


def sym2_orbit_decompose_upto4(u, n) -> OrbitDecomposition:
    """Split ``U = G @ S`` with ``G`` in the commutant of ``N`` (two to four
    distinct eigenvalues) and ``S`` a product of two symmetries.

    The eigenvalues are grouped two-and-two; the grouped corners of ``U`` are
    rotated positive, which leaves one global symmetry, and the two rotations
    are recursively split inside their own blocks.
    """
    u = numlin.as_matrix(u)
    n = numlin.as_matrix(n)
    if u.shape != n.shape:
        raise ValueError("dimension mismatch between U and N")
    _check_normal(n, 1e-9)
    er, clusters = _eig_clusters(n)
    k = len(clusters)
    if k >= 5:
        raise TooManyEigenvaluesError(
            f"{k} distinct eigenvalues: no decision procedure is known")
    if k < 2:
        raise WrongEigenvalueCountError("need at least two distinct eigenvalues")
    if symcore.is_symmetry(u, 1e-8):
        return OrbitDecomposition(eye(u.shape[0]), u.copy(),
                                  (u.copy(), eye(u.shape[0])), 0.0)
    q, sizes = _grouped_basis(er, clusters)
    up = dagger(q) @ u @ q

    first = sizes[:2]
    rest = sizes[2:] if k > 2 else [sizes[1]]
    if k == 2:
        first = [sizes[0]]
        rest = [sizes[1]]
    m1 = sum(first)
    m2 = sum(rest)

    v1 = up[:m1, :m1]
    v4 = up[m1:, m1:]
    r1, _ = numlin.polar(v1)
    r4, _ = numlin.polar(v4)
    rot = np.zeros_like(up)
    rot[:m1, :m1] = r1
    rot[m1:, m1:] = -r4
    y = dagger(rot) @ up
    if not symcore.is_symmetry(y, 1e-6):
        # near-singular grouped corners: rebuild the rotations from a nudged
        # copy of U, keeping y = rot* @ up exact
        rot_y = _perturbed_corner_rotation(up, m1)
        if rot_y is None:
            raise symcore.SymmetrizationFailedError(
                "grouped corner symmetrisation failed")
        rot, y = rot_y

    w1, j1 = _commutant_split(rot[:m1, :m1], first)
    w2, j2 = _commutant_split(rot[m1:, m1:], rest)

    gp = np.zeros_like(up)
    gp[:m1, :m1] = w1
    gp[m1:, m1:] = w2
    jpair = np.zeros_like(up)
    jpair[:m1, :m1] = j1
    jpair[m1:, m1:] = j2
    sp = jpair @ y

    g = q @ gp @ dagger(q)
    s = q @ sp @ dagger(q)
    part1 = q @ jpair @ dagger(q)
    part2 = q @ y @ dagger(q)
    residual = frob(g @ s - u)
    return OrbitDecomposition(g, s, (part1, part2), residual)


def _perturbed_corner_rotation(up: np.ndarray, m1: int):
    """Ladder fallback mirroring ``symmetrize_corners``: polar rotations from
    a nudged copy, symmetry test on the original."""
    d = up.shape[0]
    best = None
    eps = 1e-4
    for attempt in range(6):
        rng = np.random.default_rng([symcore._LADDER_SEED, 77, attempt])
        gmat = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        h = 0.5 * (gmat + dagger(gmat))
        nudged = up @ symcore._expm_skew(h, eps)
        r1, _ = numlin.polar(nudged[:m1, :m1])
        r4, _ = numlin.polar(nudged[m1:, m1:])
        rot = np.zeros_like(up)
        rot[:m1, :m1] = r1
        rot[m1:, m1:] = -r4
        y = dagger(rot) @ up
        resid = frob(y @ y - eye(d)) + frob(y - dagger(y))
        if best is None or resid < best[0]:
            best = (resid, rot, y)
        eps /= 10.0
    if best is None or not symcore.is_symmetry(best[2], 1e-6):
        return None
    return best[1], best[2]


def sym2_three_eig_diag(alpha: Angle, beta: Angle, gamma: Angle):
    """Diagonal three-eigenvalue test: when the product of the three points is
    ``+-1`` and their sum is real, one of them is that sign and the other two
    are conjugates, so the diagonal matrix is a product of two symmetries.

    Returns ``(True, certificate)`` with the certificate naming the real
    entry and the conjugate pair.
    """
    vals = [alpha.value, beta.value, gamma.value]
    prod = vals[0] * vals[1] * vals[2]
    total = vals[0] + vals[1] + vals[2]
    sign = None
    if abs(prod - 1.0) <= 1e-10:
        sign = 1
    elif abs(prod + 1.0) <= 1e-10:
        sign = -1
    if sign is None or abs(total.imag) > 1e-10:
        raise HypothesisFailedError(
            f"product {prod:.3g} not +-1 or sum {total:.3g} not real")
    real_index = None
    for i, v in enumerate(vals):
        if abs(v - sign) <= 1e-9:
            real_index = i
            break
    if real_index is None:
        raise HypothesisFailedError("no entry equals the determinant sign")
    pair = tuple(i for i in range(3) if i != real_index)
    i, j = pair
    if abs(vals[i] - np.conj(vals[j])) > 1e-9:
        raise HypothesisFailedError("remaining entries are not conjugate")
    certificate = {"real_index": real_index, "real_value": sign, "pair": pair}
    return True, certificate


def rank_asymmetry_witness(d1: int, d2: int, d3: int) -> np.ndarray:
    """Unitary whose (3,1) block has rank one while its (1,3) block vanishes,
    relative to the splitting ``(d1, d2, d3)``: a three-cycle on one unit
    vector from each block, identity elsewhere."""
    if min(d1, d2, d3) < 1:
        raise ValueError("all block dimensions must be >= 1")
    d = d1 + d2 + d3
    e = 0
    f = d1
    g = d1 + d2
    u = eye(d)
    for i in (e, f, g):
        u[i, i] = 0.0
    u[g, e] = 1.0  # block (3,1)
    u[e, f] = 1.0  # block (1,2)
    u[f, g] = 1.0  # block (2,3)
    return u


def matrix_rank(a, tol: float = RANK_TOL) -> int:
    """Rank via singular values above ``tol`` (square blocks are padded)."""
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0
    rows, cols = a.shape
    d = max(rows, cols)
    padded = np.zeros((d, d), dtype=np.complex128)
    padded[:rows, :cols] = a
    _, s, _ = numlin.svd(padded)
    return int((s > tol).sum())


def block_ranks(mat: np.ndarray, dims: tuple[int, int, int]) -> tuple[int, int]:
    """Ranks of the (1,3) and (3,1) blocks of ``mat`` under a 3-splitting."""
    d1, d2, d3 = dims
    a = mat[:d1, d1 + d2:]
    b = mat[d1 + d2:, :d1]
    return matrix_rank(a), matrix_rank(b)
