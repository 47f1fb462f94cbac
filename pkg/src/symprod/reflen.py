"""Reflection length and the exclusion screens for three-symmetry products.

The length of a determinant-``+-1`` unitary -- the least number of
reflections (rank-one perturbations of the identity that are symmetries)
whose product it is -- equals ``max(kappa(W), kappa(W*))`` where ``kappa`` is
the eigenvalue-angle sum divided by pi.

Four necessary-condition screens for membership in the three-symmetry class
follow: a length bound, a spectral-arc obstruction, a half-plane length
identity, and a determinant parity.  An "excluded" verdict is a proof of
non-membership; "pass" is inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numlin
from .symfactor import DeterminantNotRealError

#: eigenvalues this close to 1 are snapped to angle 0 so that rounding noise
#: cannot inflate the angle sum
ANGLE_SNAP = 1e-9
DET_TOL = 1e-7
ARC_MARGIN = 1e-10


@dataclass
class ScreenResult:
    status: str  # "pass" | "excluded" | "not-applicable"
    detail: str = ""

    @property
    def excluded(self) -> bool:
        return self.status == "excluded"


@dataclass
class LengthReport:
    """Angles, angle sums and reflection length of a unitary.

    ``length`` is ``None`` when the determinant is not ``+-1`` (the length
    formula needs a real determinant).  ``screens`` is populated by
    ``sym3_screen`` only.
    """

    d: int
    angles: np.ndarray
    kappa: float
    kappa_star: float
    length: int | None
    det_real: bool
    det_value: complex = 1.0 + 0.0j
    screens: dict[str, ScreenResult] = field(default_factory=dict)


def _angles_and_det(w, tol: float) -> tuple[np.ndarray, complex]:
    er = numlin.unitary_eig(w, tol)
    lam = er.eigenvalues
    ang = np.mod(np.angle(lam), 2.0 * math.pi)
    ang[np.abs(lam - 1.0) <= ANGLE_SNAP] = 0.0
    det = complex(np.prod(lam))
    return np.sort(ang), det


def _build_report(w, tol: float) -> LengthReport:
    w = numlin.as_matrix(w)
    d = w.shape[0]
    ang, det = _angles_and_det(w, tol)
    kappa = float(ang.sum() / math.pi)
    nonzero = int((ang > 0.0).sum())
    kappa_star = 2.0 * nonzero - kappa
    det_real = min(abs(det - 1.0), abs(det + 1.0)) <= DET_TOL
    length = None
    if det_real:
        raw = max(kappa, kappa_star)
        length = round(raw)
        if abs(raw - length) > 1e-7:
            raise ArithmeticError(
                f"length {raw} strayed from the integers despite det = +-1"
            )
    return LengthReport(d=d, angles=ang, kappa=kappa, kappa_star=kappa_star,
                        length=length, det_real=det_real, det_value=det)


def reflection_length(w, tol: float = numlin.DEFAULT_TOL) -> LengthReport:
    """Reflection length of a unitary with determinant ``+-1``."""
    report = _build_report(w, tol)
    if not report.det_real:
        raise DeterminantNotRealError("reflection length needs det = +-1")
    return report


def sym3_screen(w, tol: float = numlin.DEFAULT_TOL) -> LengthReport:
    """Run the four exclusion screens on any unitary.

    * ``length_bound``: members satisfy ``length <= d + floor(d/2)``.
    * ``single_arc``: a spectrum strictly inside one open quarter-circle arc
      ``((m-1) pi/2, m pi/2)`` excludes membership.
    * ``lower_halfplane``: when every angle lies in the open ``(pi, 2 pi)``,
      members need ``d`` even and ``length == d + floor(d/2)``.
    * ``determinant_parity``: when moreover ``d`` is even, members need
      ``det == (-1)^(d/2)``.
    """
    report = _build_report(w, tol)
    d = report.d
    ang = report.angles
    bound = d + d // 2
    screens: dict[str, ScreenResult] = {}

    if report.det_real:
        if report.length > bound:
            screens["length_bound"] = ScreenResult(
                "excluded", f"length {report.length} exceeds {bound}")
        else:
            screens["length_bound"] = ScreenResult(
                "pass", f"length {report.length} within {bound}")
    else:
        screens["length_bound"] = ScreenResult("not-applicable", "det not +-1")

    arc = None
    for mq in range(1, 5):
        lo = (mq - 1) * math.pi / 2.0
        hi = mq * math.pi / 2.0
        if np.all(ang > lo + ARC_MARGIN) and np.all(ang < hi - ARC_MARGIN):
            arc = mq
            break
    if arc is not None:
        screens["single_arc"] = ScreenResult(
            "excluded", f"spectrum inside open quarter arc {arc}")
    else:
        screens["single_arc"] = ScreenResult("pass", "spectrum not confined to one arc")

    lower = bool(np.all(ang > math.pi + ARC_MARGIN) and np.all(ang < 2.0 * math.pi - ARC_MARGIN))
    if lower and report.det_real:
        if d % 2 == 1:
            screens["lower_halfplane"] = ScreenResult(
                "excluded", f"odd dimension {d} with lower half-plane spectrum")
        elif report.length != bound:
            screens["lower_halfplane"] = ScreenResult(
                "excluded", f"length {report.length} != {bound}")
        else:
            screens["lower_halfplane"] = ScreenResult("pass", f"length equals {bound}")
    elif lower:
        screens["lower_halfplane"] = ScreenResult("not-applicable", "det not +-1")
    else:
        screens["lower_halfplane"] = ScreenResult(
            "not-applicable", "spectrum not inside the open lower half-plane")

    if lower and d % 2 == 0:
        want = 1.0 if (d // 2) % 2 == 0 else -1.0
        det = report.det_value
        if abs(det - want) > DET_TOL:
            screens["determinant_parity"] = ScreenResult(
                "excluded", f"det {det:.6g} != required {want:g}")
        else:
            screens["determinant_parity"] = ScreenResult(
                "pass", f"det matches required {want:g}")
    else:
        screens["determinant_parity"] = ScreenResult(
            "not-applicable", "needs even dimension and lower half-plane spectrum")

    report.screens = screens
    return report


def excluded(report: LengthReport) -> bool:
    """True when any screen proves non-membership."""
    return any(s.excluded for s in report.screens.values())
