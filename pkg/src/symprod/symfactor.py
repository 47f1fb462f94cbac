"""Membership deciders and constructive factorizations.

The central question: for which unit-circle pairs ``alpha != beta`` and
multiplicities ``r >= s >= 1`` is ``V = alpha I_r (+) beta I_s`` a product of
three symmetries?  Under the purity hypothesis *Condition (P)* (``alpha^r
beta^s`` is ``+-1`` and no shorter power relation exists) the answer is a
small case split on the parity of ``d = r + s`` and the gap ``r - s``, each
case carrying a family of strict chord inequalities.  Every "yes" here is
constructive: the witness is assembled from 2x2 blocks

    ``Y_j = [[a m_j, a n_j], [b n_j, -b m_j]]``,   ``m_j^2 + n_j^2 = 1``,

whose eigenvalues chain into conjugate pairs.

Angles are held exactly as rational turns whenever possible so that the
power-relation scans are integer arithmetic, not float comparisons.

Also here: the conjugate-pair test and factorization for products of two
symmetries, and the chained pairing that factors any determinant ``+-1``
unitary into four symmetries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import numlin, symcore
from .numlin import dagger, eye, frob
from .symcore import NotSym2Error, _pair_conjugate_spectrum, _prop_factor_blocks

TWO_PI = 2.0 * math.pi
FLOAT_ANGLE_TOL = 1e-12
MATCH_TOL = 1e-7
#: strict inequalities with |slack| below this are boundary cases: verdict no
BOUNDARY_BAND = 1e-10


class ConditionPViolatedError(ValueError):
    """The purity hypothesis fails for the supplied angles and exponents."""


class ResidualTooLargeError(RuntimeError):
    """A constructed factorization missed its tolerance (margin ~ 0)."""


class NotPrimeError(ValueError):
    pass


class DeterminantNotRealError(ValueError):
    """Determinant is not ``+-1``, so no factorization into symmetries exists."""


# ---------------------------------------------------------------------------
# angles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Angle:
    """A point on the unit circle.

    Exactly one representation is active: ``turns`` (an exact ``Fraction`` of
    a full revolution, reduced into ``[0, 1)``) or ``rad`` (float radians in
    ``[0, 2*pi)``).  Rational angles support exact power arithmetic; float
    comparisons use a ``1e-12`` tolerance.
    """

    turns: Fraction | None = None
    rad: float | None = None

    def __post_init__(self):
        if (self.turns is None) == (self.rad is None):
            raise ValueError("exactly one of turns/rad must be set")
        if self.turns is not None:
            object.__setattr__(self, "turns", self.turns % 1)
        else:
            object.__setattr__(self, "rad", float(self.rad) % TWO_PI)

    @classmethod
    def from_turns(cls, num: int, den: int = 1) -> "Angle":
        return cls(turns=Fraction(num, den))

    @classmethod
    def from_fraction(cls, fr: Fraction) -> "Angle":
        return cls(turns=Fraction(fr))

    @classmethod
    def from_radians(cls, x: float) -> "Angle":
        return cls(rad=float(x))

    @property
    def is_rational(self) -> bool:
        return self.turns is not None

    @property
    def radians(self) -> float:
        if self.turns is not None:
            return float(self.turns) * TWO_PI
        return self.rad

    @property
    def value(self) -> complex:
        return complex(math.cos(self.radians), math.sin(self.radians))

    def times(self, k: int) -> "Angle":
        """The point raised to the integer power ``k``."""
        if self.turns is not None:
            return Angle(turns=self.turns * k)
        return Angle(rad=math.fmod(self.rad * k, TWO_PI))

    def plus(self, other: "Angle") -> "Angle":
        if self.turns is not None and other.turns is not None:
            return Angle(turns=self.turns + other.turns)
        return Angle(rad=self.radians + other.radians)

    def antipode(self) -> "Angle":
        """The negated point ``-z``."""
        return self.plus(Angle(turns=Fraction(1, 2)) if self.is_rational
                         else Angle(rad=math.pi))

    def conjugate(self) -> "Angle":
        if self.turns is not None:
            return Angle(turns=-self.turns)
        return Angle(rad=-self.rad)

    def halved(self) -> "Angle":
        """Principal square root of the point."""
        if self.turns is not None:
            return Angle(turns=self.turns / 2)
        return Angle(rad=self.rad / 2.0)

    def pm_one(self) -> int | None:
        """``+1``/``-1`` if the point is (within tolerance) that value."""
        if self.turns is not None:
            if self.turns == 0:
                return 1
            if self.turns == Fraction(1, 2):
                return -1
            return None
        if self.rad <= FLOAT_ANGLE_TOL or TWO_PI - self.rad <= FLOAT_ANGLE_TOL:
            return 1
        if abs(self.rad - math.pi) <= FLOAT_ANGLE_TOL:
            return -1
        return None

    def same_point(self, other: "Angle", tol: float = FLOAT_ANGLE_TOL) -> bool:
        if self.turns is not None and other.turns is not None:
            return self.turns == other.turns
        return self.chord(other) <= tol

    def chord(self, other: "Angle") -> float:
        """``|z1 - z2|`` computed from the angle difference."""
        return 2.0 * abs(math.sin((self.radians - other.radians) / 2.0))

    def __str__(self) -> str:
        if self.turns is not None:
            return f"{self.turns} turn"
        return f"{self.rad:.12g} rad"


def power_product(alpha: Angle, i: int, beta: Angle, j: int) -> Angle:
    """The point ``alpha^i * beta^j``."""
    return alpha.times(i).plus(beta.times(j))


@dataclass(frozen=True)
class EigenSpec:
    """Unit-circle eigenvalues with multiplicities; angles pairwise distinct."""

    pairs: tuple[tuple[Angle, int], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("eigen-spec needs at least one angle")
        for _, mult in self.pairs:
            if mult < 1:
                raise ValueError("multiplicities must be positive")
        angles = [a for a, _ in self.pairs]
        for i in range(len(angles)):
            for j in range(i + 1, len(angles)):
                a, b = angles[i], angles[j]
                if a.is_rational and b.is_rational:
                    if a.turns == b.turns:
                        raise ValueError("angles must be pairwise distinct")
                elif a.chord(b) <= 1e-10:
                    raise ValueError("angles closer than 1e-10 are not distinct")

    @property
    def dimension(self) -> int:
        return sum(m for _, m in self.pairs)

    def to_matrix(self) -> np.ndarray:
        vals = []
        for a, m in self.pairs:
            vals.extend([a.value] * m)
        return np.diag(np.array(vals, dtype=np.complex128))


# ---------------------------------------------------------------------------
# Condition (P)
# ---------------------------------------------------------------------------


@dataclass
class ConditionPReport:
    """Outcome of the purity scan for ``(alpha, beta, r, s)``.

    ``holds`` iff ``alpha^r beta^s`` is ``+-1`` (its value in ``power_value``)
    and no pair ``(i, j) != (0, 0)`` with ``i + j < d`` satisfies
    ``alpha^i beta^j in {-1, 1}`` (the first offender lands in ``violation``).
    """

    holds: bool
    d: int
    r: int
    s: int
    power_value: int | None
    violation: tuple[int, int, complex] | None


def condition_p(alpha: Angle, beta: Angle, r: int, s: int) -> ConditionPReport:
    """Exhaustive scan for short power relations ``alpha^i beta^j in {-1, 1}``."""
    if not (r >= s >= 1):
        raise ValueError("exponents must satisfy r >= s >= 1")
    if alpha.same_point(beta):
        raise ValueError("angles must be distinct")
    d = r + s

    if alpha.is_rational and beta.is_rational:
        # integer arithmetic: alpha^i beta^j = +-1 iff i*na + j*nb = 0 mod den
        # (with -1 at the half-turn residue)
        den = math.lcm(alpha.turns.denominator, beta.turns.denominator)
        na = int(alpha.turns * den)
        nb = int(beta.turns * den)
        half = den // 2 if den % 2 == 0 else None

        def classify(i: int, j: int) -> int | None:
            rem = (i * na + j * nb) % den
            if rem == 0:
                return 1
            if half is not None and rem == half:
                return -1
            return None
    else:

        def classify(i: int, j: int) -> int | None:
            return power_product(alpha, i, beta, j).pm_one()

    violation = None
    for total in range(1, d):
        for i in range(total + 1):
            j = total - i
            val = classify(i, j)
            if val is not None:
                violation = (i, j, complex(val))
                break
        if violation:
            break
    power_value = classify(r, s)
    return ConditionPReport(
        holds=violation is None and power_value is not None,
        d=d,
        r=r,
        s=s,
        power_value=power_value,
        violation=violation,
    )


# ---------------------------------------------------------------------------
# polygon geometry for the equal-multiplicity case
# ---------------------------------------------------------------------------


def polygon_min(d0: int) -> float:
    """Smallest achievable max-distance from a point of the circle to the
    vertex set ``{(alpha*beta)^(2j-1)}`` (a regular ``d0``-gon):
    ``|exp(i*pi*(d0-1)/d0) - 1|``."""
    if d0 < 1:
        raise ValueError("d0 must be >= 1")
    return 2.0 * math.sin(math.pi * (d0 - 1) / (2.0 * d0))


def polygon_gap(alpha: Angle, beta: Angle, d0: int, gamma: complex) -> float:
    """``max_j |(alpha*beta)^(2j-1) - gamma|`` over ``1 <= j <= d0``."""
    ab = alpha.plus(beta)
    return max(abs(ab.times(2 * j - 1).value - gamma) for j in range(1, d0 + 1))


def polygon_argmin(alpha: Angle, beta: Angle, d0: int) -> Angle:
    """A minimiser of ``polygon_gap``: a vertex for odd ``d0``, the midpoint
    of an arc between adjacent vertices for even ``d0``."""
    ab = alpha.plus(beta)
    if d0 % 2 == 1:
        return ab
    if ab.is_rational:
        return ab.plus(Angle(turns=Fraction(1, 2 * d0)))
    return ab.plus(Angle(rad=math.pi / d0))


# ---------------------------------------------------------------------------
# the two-eigenvalue decider
# ---------------------------------------------------------------------------


@dataclass
class Sym3Decision:
    """Verdict for ``alpha I_r (+) beta I_s`` as a product of three symmetries.

    ``case`` names either the constructive route (``dim2``, ``odd``,
    ``even-gap2``, ``even-equal-i/ii/iii``) or the exclusion reason.  ``m``
    carries the 2x2 block entries of the witness, ``theta`` the off-real
    square root used by the equal-multiplicity route, ``margins`` the slack of
    every strict inequality that was tested for the recorded case.
    """

    verdict: str
    case: str
    d: int
    r: int
    s: int
    swapped: bool
    m: list[float] = field(default_factory=list)
    theta: Angle | None = None
    margins: list[float] = field(default_factory=list)
    boundary: bool = False
    power_value: int | None = None

    @property
    def is_member(self) -> bool:
        return self.verdict == "yes"


def _omega_chain_m(alpha: Angle, beta: Angle, d0: int) -> list[float]:
    """Block entries for the chains whose j-th block has spectrum
    ``{conj((-ab)^(j-1) a), (-ab)^j a}``."""
    a = alpha.value
    b = beta.value
    out = []
    for j in range(1, d0 + 1):
        num = (-1) ** (j - 1) * (np.conj(a**j * b ** (j - 1)) - a ** (j + 1) * b**j)
        m = num / (a - b)
        if abs(m.imag) > 1e-10:
            raise ResidualTooLargeError("block entry drifted off the real axis")
        out.append(float(m.real))
    return out


def _theta_chain_m(alpha: Angle, beta: Angle, d0: int, theta: Angle) -> list[float]:
    """Block entries for the equal-multiplicity chains with spectrum
    ``{(-conj(ab))^(j-1) theta, (-ab)^j conj(theta)}``."""
    a = alpha.value
    b = beta.value
    ab = a * b
    th = theta.value
    out = []
    for j in range(1, d0 + 1):
        m = ((-np.conj(ab)) ** (j - 1) * th + (-ab) ** j * np.conj(th)) / (a - b)
        if abs(m.imag) > 1e-10:
            raise ResidualTooLargeError("block entry drifted off the real axis")
        out.append(float(m.real))
    return out


def _inequality_margins(alpha: Angle, beta: Angle, points: list[Angle]) -> list[float]:
    """Slack ``|alpha - beta| - |p - 1|`` for each point ``p``."""
    gap = alpha.chord(beta)
    one = Angle.from_turns(0)
    return [gap - p.chord(one) for p in points]


def _margins_ok(margins: list[float]) -> tuple[bool, bool]:
    """(all strictly positive beyond the boundary band, any boundary hit)."""
    boundary = any(abs(mg) < BOUNDARY_BAND for mg in margins)
    ok = all(mg > BOUNDARY_BAND for mg in margins)
    return ok, boundary


def _select_theta(alpha: Angle, beta: Angle, d0: int,
                  power_value: int, divisible_by_four: bool) -> tuple[Angle, list[float]]:
    """Choose the chain parameter ``theta`` for the equal-multiplicity case.

    When ``(alpha*beta)^d0 == +1`` or ``4 | d`` the eigenvalue chain closes
    through two real endpoints and ``theta = 1`` is the construction.  In the
    remaining subcase the chain closes on itself and ``theta`` is the
    principal square root of the polygon-gap minimiser, nudged off the real
    axis if it happens to land there.  Margins are the per-vertex slacks
    ``|alpha - beta| - |(alpha*beta)^(2j-1) - theta^2|``.
    """
    gap = alpha.chord(beta)
    ab = alpha.plus(beta)

    def margins_for(th: Angle) -> list[float]:
        g = th.times(2)
        return [gap - ab.times(2 * j - 1).chord(g) for j in range(1, d0 + 1)]

    if power_value == 1 or divisible_by_four:
        theta = Angle.from_turns(0)
        return theta, margins_for(theta)

    theta = polygon_argmin(alpha, beta, d0).halved()
    margins = margins_for(theta)
    if abs(theta.value.imag) > 1e-9:
        return theta, margins
    delta = Fraction(1, 10**6)
    for _ in range(20):
        cand = theta.plus(Angle(turns=delta))
        margins = margins_for(cand)
        ok, _ = _margins_ok(margins)
        if ok:
            return cand, margins
        delta /= 2
    raise ResidualTooLargeError("could not rotate theta off the real axis")


def sym3_two_eig_decide(alpha: Angle, beta: Angle, r: int, s: int) -> Sym3Decision:
    """Decide whether ``alpha I_r (+) beta I_s`` is a product of three
    symmetries, assuming Condition (P) (checked; violation raises).

    The case split on ``d = r + s`` (after ordering ``r >= s``):

    * ``d == 2``: membership is exactly ``det in {-1, 1}``.
    * ``d`` odd: needs ``r - s == 1`` plus the chord inequalities
      ``|1 - (ab)^(2j-1)| < |a - b|``.
    * ``d`` even, ``r - s == 2``: needs ``a^r b^s == (-1)^(d0+1)`` plus
      ``|1 - a^(2j+1) b^(2j-1)| < |a - b|``.
    * ``d`` even, ``r == s``: one of three conditions (tested in order):
      (i) ``4 | d``, ``(ab)^r == -1`` and the polygon bound;
      (ii) ``4 !| d`` and the polygon bound;
      (iii) ``4 !| d``, ``(ab)^r == -1`` and the gap-two style inequalities.
    * anything else: excluded by a dimension count.
    """
    swapped = False
    if s > r:
        alpha, beta = beta, alpha
        r, s = s, r
        swapped = True
    d = r + s

    if d == 2:
        det = power_product(alpha, 1, beta, 1)
        sign = det.pm_one()
        if sign is not None:
            return Sym3Decision("yes", "dim2", d, r, s, swapped, power_value=sign)
        return Sym3Decision("no", "det-not-real", d, r, s, swapped)

    rep = condition_p(alpha, beta, r, s)
    if not rep.holds:
        raise ConditionPViolatedError(
            f"Condition (P) fails for ({alpha}, {beta}, r={r}, s={s}): "
            f"violation={rep.violation}, power={rep.power_value}"
        )
    pw = rep.power_value

    if d % 2 == 1:
        if r - s != 1:
            return Sym3Decision("no", "dimension-count", d, r, s, swapped, power_value=pw)
        d0 = (d - 1) // 2
        ab = alpha.plus(beta)
        points = [ab.times(2 * j - 1) for j in range(1, d0 + 1)]
        margins = _inequality_margins(alpha, beta, points)
        ok, boundary = _margins_ok(margins)
        if not ok:
            return Sym3Decision("no", "inequality-violated", d, r, s, swapped,
                                margins=margins, boundary=boundary, power_value=pw)
        m = _omega_chain_m(alpha, beta, d0)
        return Sym3Decision("yes", "odd", d, r, s, swapped, m=m,
                            margins=margins, power_value=pw)

    if r - s == 2:
        d0 = (d - 2) // 2
        required = -1 if d0 % 2 == 0 else 1  # (-1)^(d0 + 1)
        if pw != required:
            return Sym3Decision("no", "power-mismatch", d, r, s, swapped, power_value=pw)
        points = [power_product(alpha, 2 * j + 1, beta, 2 * j - 1) for j in range(1, d0 + 1)]
        margins = _inequality_margins(alpha, beta, points)
        ok, boundary = _margins_ok(margins)
        if not ok:
            return Sym3Decision("no", "inequality-violated", d, r, s, swapped,
                                margins=margins, boundary=boundary, power_value=pw)
        m = _omega_chain_m(alpha, beta, d0)
        return Sym3Decision("yes", "even-gap2", d, r, s, swapped, m=m,
                            margins=margins, power_value=pw)

    if r != s:
        return Sym3Decision("no", "dimension-count", d, r, s, swapped, power_value=pw)

    # equal multiplicities
    d0 = r
    boundary_seen = False

    if d % 4 == 0:
        if pw == -1:
            theta, margins = _select_theta(alpha, beta, d0, pw, True)
            ok, boundary = _margins_ok(margins)
            boundary_seen |= boundary
            if ok:
                m = _theta_chain_m(alpha, beta, d0, theta)
                return Sym3Decision("yes", "even-equal-i", d, r, s, swapped, m=m,
                                    theta=theta, margins=margins, power_value=pw)
        return Sym3Decision("no", "no-case-satisfied", d, r, s, swapped,
                            boundary=boundary_seen, power_value=pw)

    # d even, not divisible by 4: case (ii) then case (iii)
    theta, margins = _select_theta(alpha, beta, d0, pw, False)
    ok, boundary = _margins_ok(margins)
    boundary_seen |= boundary
    if ok:
        m = _theta_chain_m(alpha, beta, d0, theta)
        return Sym3Decision("yes", "even-equal-ii", d, r, s, swapped, m=m,
                            theta=theta, margins=margins, power_value=pw)
    if pw == -1:
        points = [power_product(alpha, 2 * j + 1, beta, 2 * j - 1) for j in range(1, d0)]
        margins3 = _inequality_margins(alpha, beta, points)
        ok, boundary = _margins_ok(margins3)
        boundary_seen |= boundary
        if ok:
            m = _omega_chain_m(alpha, beta, d0 - 1)
            return Sym3Decision("yes", "even-equal-iii", d, r, s, swapped, m=m,
                                margins=margins3, power_value=pw)
    return Sym3Decision("no", "no-case-satisfied", d, r, s, swapped,
                        boundary=boundary_seen, power_value=pw)


# ---------------------------------------------------------------------------
# conjugate-pair membership (two symmetries)
# ---------------------------------------------------------------------------


def sym2_check(u, tol: float = numlin.DEFAULT_TOL) -> tuple[bool, list[tuple[int, int]]]:
    """A unitary is a product of two symmetries iff its non-real eigenvalues
    pair off as conjugates.  Returns the pairing (index pairs into the
    eigenvalue list of ``unitary_eig``) as a certificate."""
    er = numlin.unitary_eig(u, tol)
    ok, pairs, _ = _pair_conjugate_spectrum(er.eigenvalues, MATCH_TOL)
    return (True, pairs) if ok else (False, [])


def sym2_factor(u, tol: float = numlin.DEFAULT_TOL,
                match_tol: float = MATCH_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Split a conjugate-paired unitary into two symmetries ``J1 @ J2 == U``.

    Built in the eigenbasis from swap blocks on conjugate pairs and sign
    blocks on the ``+-1`` eigenvalues.
    """
    er = numlin.unitary_eig(u, tol)
    ok, pairs, reals = _pair_conjugate_spectrum(er.eigenvalues, match_tol)
    if not ok:
        raise NotSym2Error("spectrum is not closed under conjugation")
    j1, j2 = _prop_factor_blocks(er.eigenvalues, er.basis, pairs, reals)
    return j1, j2


# ---------------------------------------------------------------------------
# factorization assembly
# ---------------------------------------------------------------------------


@dataclass
class FactorizationResiduals:
    hermitian: list[float]
    involution: list[float]
    product: float


@dataclass
class SymmetryFactorization:
    """An ordered list of symmetry factors together with the unitary mapping
    the canonical diagonal target into the frame the factors live in, and the
    interleaving permutation used during assembly."""

    factors: list[np.ndarray]
    conjugator: np.ndarray
    permutation: list[int]
    residuals: FactorizationResiduals

    @property
    def product(self) -> np.ndarray:
        out = eye(self.factors[0].shape[0])
        for f in self.factors:
            out = out @ f
        return out


def _residuals_against(target: np.ndarray, factors: list[np.ndarray]) -> FactorizationResiduals:
    d = target.shape[0]
    herm = [frob(f - dagger(f)) for f in factors]
    invol = [frob(f @ f - eye(d)) for f in factors]
    prod = eye(d)
    for f in factors:
        prod = prod @ f
    return FactorizationResiduals(herm, invol, frob(prod - target))


def sym3_two_eig_factor(decision: Sym3Decision, alpha: Angle, beta: Angle,
                        r: int, s: int) -> SymmetryFactorization:
    """Materialise the witness for a "yes" decision.

    Assembles the two-symmetry part ``Z`` (head blocks plus the 2x2 chain) and
    the third symmetry ``J`` in an interleaved frame, splits ``Z`` with
    ``sym2_factor`` and records the permutation back to the canonical
    ``alpha I_r (+) beta I_s`` ordering.
    """
    if not decision.is_member:
        raise ValueError("cannot factor a 'no' decision")
    if decision.swapped:
        alpha, beta = beta, alpha
        r, s = s, r
    d = r + s
    a = alpha.value
    b = beta.value
    m = np.asarray(decision.m, dtype=float)
    if np.any(np.abs(m) >= 1.0):
        raise ResidualTooLargeError("block entries reached the unit bound")
    n = np.sqrt(1.0 - m * m)

    z = np.zeros((d, d), dtype=np.complex128)
    jj = np.zeros((d, d), dtype=np.complex128)
    # slots[i] = "a" if the i-th interleaved position carries the first angle
    slots: list[str] = []
    pos = 0

    def put_head(zvals, jvals, kinds):
        nonlocal pos
        for zv, jv, kind in zip(zvals, jvals, kinds):
            z[pos, pos] = zv
            jj[pos, pos] = jv
            slots.append(kind)
            pos += 1

    case = decision.case
    if case == "dim2":
        z[0, 1] = a
        z[1, 0] = b
        jj[0, 1] = 1.0
        jj[1, 0] = 1.0
        slots.extend(["a", "b"])
        pos = 2
    else:
        if case == "odd":
            put_head([a], [1.0], ["a"])
        elif case == "even-gap2":
            put_head([a, -a], [1.0, -1.0], ["a", "a"])
        elif case == "even-equal-iii":
            put_head([a], [1.0], ["a"])
        elif case not in ("even-equal-i", "even-equal-ii"):
            raise ValueError(f"unknown case {case!r}")
        for mj, nj in zip(m, n):
            z[pos, pos] = a * mj
            z[pos, pos + 1] = a * nj
            z[pos + 1, pos] = b * nj
            z[pos + 1, pos + 1] = -b * mj
            jj[pos, pos] = mj
            jj[pos, pos + 1] = nj
            jj[pos + 1, pos] = nj
            jj[pos + 1, pos + 1] = -mj
            slots.extend(["a", "b"])
            pos += 2
        if case == "even-equal-iii":
            z[pos, pos] = -b
            jj[pos, pos] = -1.0
            slots.append("b")
            pos += 1
    if pos != d:
        raise ResidualTooLargeError("assembled blocks do not fill the dimension")

    # permutation: interleaved position i holds canonical index perm[i]
    perm = []
    next_a, next_b = 0, r
    for kind in slots:
        if kind == "a":
            perm.append(next_a)
            next_a += 1
        else:
            perm.append(next_b)
            next_b += 1

    j1, j2 = sym2_factor(z)
    factors = [j1, j2, jj]
    target = np.zeros((d, d), dtype=np.complex128)
    for i, p in enumerate(perm):
        target[i, i] = a if p < r else b
    res = _residuals_against(target, factors)
    if res.product > 1e-7:
        raise ResidualTooLargeError(f"product residual {res.product:.2e} exceeds 1e-7")

    conj = np.zeros((d, d), dtype=np.complex128)
    for i, p in enumerate(perm):
        conj[i, p] = 1.0
    return SymmetryFactorization(factors, conj, perm, res)


def prime_root_block(p: int) -> tuple[EigenSpec, SymmetryFactorization]:
    """The canonical member on a prime-dimensional space: ``alpha`` a
    primitive ``p``-th root of unity, ``beta = -alpha``, multiplicities
    ``(p+1)/2`` and ``(p-1)/2``."""
    if p < 3 or any(p % k == 0 for k in range(2, int(math.isqrt(p)) + 1)):
        raise NotPrimeError(f"{p} is not an odd prime >= 3")
    alpha = Angle.from_turns(1, p)
    beta = alpha.antipode()
    r = (p + 1) // 2
    s = (p - 1) // 2
    spec = EigenSpec(((alpha, r), (beta, s)))
    decision = sym3_two_eig_decide(alpha, beta, r, s)
    if not decision.is_member:
        raise ResidualTooLargeError(f"prime block p={p} unexpectedly rejected")
    return spec, sym3_two_eig_factor(decision, alpha, beta, r, s)


# ---------------------------------------------------------------------------
# four symmetries
# ---------------------------------------------------------------------------


def sym4_factor(u, tol: float = numlin.DEFAULT_TOL) -> SymmetryFactorization:
    """Factor a determinant-``+-1`` unitary into four symmetries.

    Diagonalise, then build two diagonal unitaries ``A, B`` with
    ``A @ B == diag(lambda)`` by a chained conjugate pairing: consecutive
    entries of ``A`` pair as conjugates, offset entries of ``B`` pair as
    conjugates, and the single leftover entry equals the (real) determinant.
    Both then split with ``sym2_factor``; the two halves commute because they
    are diagonal in a common basis.
    """
    u = numlin.as_matrix(u)
    d = u.shape[0]
    if numlin.unitarity_defect(u) > max(tol, 1e-9):
        raise numlin.NotUnitaryError("sym4_factor needs a unitary input")
    er = numlin.unitary_eig(u, max(tol, 1e-9))
    if symcore.is_symmetry(u, 1e-8):
        factors = [u, eye(d), eye(d), eye(d)]
        return SymmetryFactorization(factors, er.basis, list(range(d)),
                                     _residuals_against(u, factors))
    detval = complex(np.prod(er.eigenvalues))
    if min(abs(detval - 1.0), abs(detval + 1.0)) > 1e-7:
        raise DeterminantNotRealError(f"determinant {detval} is not +-1")

    lam = er.eigenvalues
    avals = np.empty(d, dtype=np.complex128)
    bvals = np.empty(d, dtype=np.complex128)
    avals[0] = lam[0]
    bvals[0] = 1.0
    for i in range(1, d):
        if i % 2 == 1:
            avals[i] = np.conj(avals[i - 1])
            bvals[i] = lam[i] / avals[i]
        else:
            bvals[i] = np.conj(bvals[i - 1])
            avals[i] = lam[i] / bvals[i]

    basis = er.basis
    amat = basis @ (avals[:, None] * dagger(basis))
    bmat = basis @ (bvals[:, None] * dagger(basis))
    j1, j2 = sym2_factor(amat, max(tol, 1e-9))
    j3, j4 = sym2_factor(bmat, max(tol, 1e-9))
    factors = [j1, j2, j3, j4]
    res = _residuals_against(u, factors)
    return SymmetryFactorization(factors, basis, list(range(d)), res)
