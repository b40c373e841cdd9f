"""Series-elastic actuator model: invertible piecewise force/displacement map.

An actuator is an elastic element in series with a tendon of stiffness k_t.
Three element kinds are supported:

  * an internal torsion spring behind the output pulley (raw stiffness k_e in
    Nmm/rad, pulley radius r, routing-pulley friction mu_p),
  * an external compression spring sleeved around the motor shell (k_e in
    N/mm, no friction term),
  * a tabulated nonlinear curve supplied as (displacement, force) pairs.

Tendon tension F_t and motor-side tendon displacement d obey, while the
element is inside its travel range (0 <= F_t <= F_tm):

    d = (F_t - mu_p*F_t)/k_ts + F_t/k_t      torsion kind, k_ts = k_e/(2*pi*r^2)
    d = F_t/k_cs + F_t/k_t                   compression kind
    d = d_table(F_t) + F_t/k_t               tabulated kind

Past the element limit only the tendon keeps stretching:

    d = d_max_total + (F_t - F_tm)/k_t

where d_max_total is the displacement at F_tm including tendon stretch. It is
computed from the element law at construction, never taken from user input,
so the two branches meet continuously. A slack tendon (d < 0) carries no
force.

Units in this module are millimeters and newtons throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

__all__ = [
    "ElementKind",
    "ElasticElementSpec",
    "ActuatorModel",
    "displacement_from_force",
    "force_from_displacement",
    "effective_stiffness",
]

# Relative slack allowed between the user-quoted travel limit and the limit
# implied by the element's own law. Published parameter sets are only about
# 2% self-consistent, so construction tolerates that much and no more.
CONSISTENCY_TOL = 0.02


class ElementKind(Enum):
    TORSION_SPRING_INTERNAL = "torsion_internal"
    COMPRESSION_SPRING_EXTERNAL = "compression_external"
    TABULATED = "tabulated"


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class ElasticElementSpec:
    """Piecewise elastic law of one actuator's spring stage.

    Fields:
        kind: element construction (torsion / compression / tabulated).
        k_e: raw element stiffness. Nmm/rad for the torsion kind, N/mm for
            the compression kind, None for tabulated.
        pulley_radius_r: output pulley radius in mm (torsion kind only).
        mu_p: internal routing-pulley friction coefficient (torsion kind
            only, 0 otherwise). 0 <= mu_p < 1.
        d_max: element travel limit measured as tendon displacement (mm),
            excluding tendon stretch.
        F_tm: tension at which the element reaches its limit (N).
        table: ordered (displacement mm, force N) pairs, strictly increasing
            in both columns, starting at (0, 0). Tabulated kind only.
    """

    kind: ElementKind
    k_e: Optional[float]
    d_max: float
    F_tm: float
    pulley_radius_r: Optional[float] = None
    mu_p: float = 0.0
    table: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self) -> None:
        _require(math.isfinite(self.d_max) and self.d_max > 0,
                 f"d_max must be positive, got {self.d_max}")
        _require(math.isfinite(self.F_tm) and self.F_tm > 0,
                 f"F_tm must be positive, got {self.F_tm}")
        _require(0.0 <= self.mu_p < 1.0,
                 f"mu_p must satisfy 0 <= mu_p < 1, got {self.mu_p}")

        if self.kind is ElementKind.TORSION_SPRING_INTERNAL:
            _require(self.k_e is not None and self.k_e > 0,
                     "torsion element requires k_e > 0 (Nmm/rad)")
            _require(self.pulley_radius_r is not None and self.pulley_radius_r > 0,
                     "torsion element requires pulley_radius_r > 0 (mm)")
            _require(self.table is None, "linear element must not carry a table")
        elif self.kind is ElementKind.COMPRESSION_SPRING_EXTERNAL:
            _require(self.k_e is not None and self.k_e > 0,
                     "compression element requires k_e > 0 (N/mm)")
            _require(self.mu_p == 0.0,
                     "compression element has no pulley friction; mu_p must be 0")
            _require(self.table is None, "linear element must not carry a table")
        elif self.kind is ElementKind.TABULATED:
            _require(self.k_e is None, "tabulated element must not set k_e")
            _require(self.mu_p == 0.0,
                     "tabulated element has no pulley friction; mu_p must be 0")
            _require(self.table is not None and len(self.table) >= 2,
                     "tabulated element requires a table of at least 2 rows")
            d0, f0 = self.table[0]
            _require(d0 == 0.0 and f0 == 0.0,
                     "tabulated curve must start at (0, 0)")
            ds = [row[0] for row in self.table]
            fs = [row[1] for row in self.table]
            _require(all(b > a for a, b in zip(ds, ds[1:])),
                     "table displacement column must be strictly increasing")
            _require(all(b > a for a, b in zip(fs, fs[1:])),
                     "table force column must be strictly increasing")
            _require(self.d_max == ds[-1],
                     "tabulated d_max must equal the last table displacement")
            _require(self.F_tm == fs[-1],
                     "tabulated F_tm must equal the last table force")
        else:  # pragma: no cover - enum is closed
            raise ValueError(f"unknown element kind {self.kind}")

        if self.kind is not ElementKind.TABULATED:
            # The quoted (d_max, F_tm) pair must agree with the element's own
            # law; published prototype tables are only ~2% self-consistent.
            law = self.displacement_at(self.F_tm)
            rel = abs(self.d_max - law) / law
            _require(rel <= CONSISTENCY_TOL,
                     f"d_max={self.d_max} mm is {rel:.1%} away from the "
                     f"element law's {law:.4f} mm at F_tm={self.F_tm} N "
                     f"(tolerance {CONSISTENCY_TOL:.0%})")

    # -- constructors -----------------------------------------------------

    @classmethod
    def torsion_internal(cls, *, pulley_radius_r: float, mu_p: float,
                         F_tm: float, k_e: Optional[float] = None,
                         k_ts: Optional[float] = None,
                         d_max: Optional[float] = None) -> "ElasticElementSpec":
        """Torsion-spring element from either k_e (Nmm/rad) or its
        tendon-equivalent stiffness k_ts = k_e/(2*pi*r^2) (N/mm).

        d_max defaults to the law value F_tm*(1-mu_p)/k_ts.
        """
        _require((k_e is None) != (k_ts is None),
                 "give exactly one of k_e or k_ts")
        if k_e is None:
            _require(k_ts > 0, "k_ts must be positive")
            k_e = k_ts * 2.0 * math.pi * pulley_radius_r ** 2
        if d_max is None:
            k_ts_val = k_e / (2.0 * math.pi * pulley_radius_r ** 2)
            d_max = F_tm * (1.0 - mu_p) / k_ts_val
        return cls(kind=ElementKind.TORSION_SPRING_INTERNAL, k_e=k_e,
                   pulley_radius_r=pulley_radius_r, mu_p=mu_p,
                   d_max=d_max, F_tm=F_tm)

    @classmethod
    def compression_external(cls, *, k_cs: float, F_tm: float,
                             d_max: Optional[float] = None) -> "ElasticElementSpec":
        """Compression-spring element; d_max defaults to F_tm/k_cs."""
        if d_max is None:
            _require(k_cs > 0, "k_cs must be positive")
            d_max = F_tm / k_cs
        return cls(kind=ElementKind.COMPRESSION_SPRING_EXTERNAL, k_e=k_cs,
                   d_max=d_max, F_tm=F_tm)

    @classmethod
    def tabulated(cls, table) -> "ElasticElementSpec":
        """Tabulated element; d_max/F_tm are the last table row."""
        rows = tuple((float(d), float(f)) for d, f in table)
        _require(len(rows) >= 2, "tabulated element requires at least 2 rows")
        return cls(kind=ElementKind.TABULATED, k_e=None,
                   d_max=rows[-1][0], F_tm=rows[-1][1], table=rows)

    # -- element law ------------------------------------------------------

    @property
    def tendon_equivalent_stiffness(self) -> float:
        """Element stiffness expressed against tendon displacement (N/mm).

        k_ts = k_e/(2*pi*r^2) for the torsion kind, k_cs for the compression
        kind. A tabulated element has no single value; use
        effective_stiffness(actuator, d) for a local secant instead.
        """
        if self.kind is ElementKind.TORSION_SPRING_INTERNAL:
            return self.k_e / (2.0 * math.pi * self.pulley_radius_r ** 2)
        if self.kind is ElementKind.COMPRESSION_SPRING_EXTERNAL:
            return self.k_e
        raise ValueError("tabulated element has no single equivalent "
                         "stiffness; pass a displacement to effective_stiffness")

    def displacement_at(self, F_t: float) -> float:
        """Element-share displacement (mm) at tension F_t, tendon excluded.

        Past F_tm the element is pinned at its limit displacement.
        """
        F = min(F_t, self.F_tm)
        if self.kind is ElementKind.TABULATED:
            fs = [row[1] for row in self.table]
            ds = [row[0] for row in self.table]
            return float(np.interp(F, fs, ds))
        # friction F_f = mu_p*F_t is taken off the element share only
        return F * (1.0 - self.mu_p) / self.tendon_equivalent_stiffness


@dataclass(frozen=True)
class ActuatorModel:
    """One compliant actuator: elastic element plus series tendon.

    Fields:
        element: the elastic element spec.
        k_t: series tendon stiffness (N/mm).
        rated_force: motor-side rated tendon force (N).
        rated_speed: rated tendon contraction speed (mm/s).
        label: free-form name.
    """

    element: ElasticElementSpec
    k_t: float
    rated_force: float
    rated_speed: float
    label: str = ""
    # displacement at F_tm including tendon stretch; derived, see module doc
    d_max_total: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _require(math.isfinite(self.k_t) and self.k_t > 0,
                 f"k_t must be positive, got {self.k_t}")
        _require(self.rated_force > 0,
                 f"rated_force must be positive, got {self.rated_force}")
        _require(self.rated_speed > 0,
                 f"rated_speed must be positive, got {self.rated_speed}")
        total = self.element.displacement_at(self.element.F_tm) \
            + self.element.F_tm / self.k_t
        object.__setattr__(self, "d_max_total", total)

    @property
    def F_tm(self) -> float:
        return self.element.F_tm


def displacement_from_force(actuator: ActuatorModel, F_t: float) -> float:
    """Tendon displacement d (mm) at tension F_t (N). Strictly increasing.

    Element deflection plus tendon stretch up to F_tm; tendon-only stretch
    beyond. F_t must be finite and >= 0.
    """
    if not math.isfinite(F_t) or F_t < 0:
        raise ValueError(f"F_t must be finite and >= 0, got {F_t}")
    el = actuator.element
    if F_t <= el.F_tm:
        return el.displacement_at(F_t) + F_t / actuator.k_t
    return actuator.d_max_total + (F_t - el.F_tm) / actuator.k_t


def _series_stiffness(actuator: ActuatorModel) -> float:
    """Working-stage series stiffness k_et (N/mm) for linear element kinds."""
    el = actuator.element
    k_el = el.tendon_equivalent_stiffness
    if el.kind is ElementKind.TORSION_SPRING_INTERNAL:
        # k_et = k_ts*k_t / (k_t*(1-mu_p) + k_ts)
        return k_el * actuator.k_t / (actuator.k_t * (1.0 - el.mu_p) + k_el)
    return k_el * actuator.k_t / (actuator.k_t + k_el)


def force_from_displacement(actuator: ActuatorModel, d: float) -> float:
    """Tendon tension F_t (N) at displacement d (mm).

    Exact inverse of displacement_from_force for d >= 0. A slack tendon
    (d < 0) carries no compression: returns 0.
    """
    if not math.isfinite(d):
        raise ValueError(f"d must be finite, got {d}")
    if d <= 0.0:
        return 0.0
    el = actuator.element
    if d >= actuator.d_max_total:
        return el.F_tm + (d - actuator.d_max_total) * actuator.k_t
    if el.kind is not ElementKind.TABULATED:
        return _series_stiffness(actuator) * d
    # monotone bracketing root-find on the forward map
    lo, hi = 0.0, el.F_tm
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        d_mid = displacement_from_force(actuator, mid)
        if abs(d_mid - d) <= 1e-12:
            return mid
        if d_mid < d:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def effective_stiffness(actuator: ActuatorModel, d: Optional[float] = None) -> float:
    """Series stiffness k_et (N/mm) of element plus tendon.

    Linear kinds return the working-stage closed form (k_et1 with the
    friction term for the torsion kind, k_et2 for the compression kind).
    A tabulated element requires a displacement argument and returns the
    local secant stiffness f_d(d)/d there.
    """
    el = actuator.element
    if el.kind is not ElementKind.TABULATED:
        return _series_stiffness(actuator)
    if d is None:
        raise ValueError("tabulated element requires a displacement "
                         "argument for effective_stiffness")
    if not math.isfinite(d) or d <= 0:
        raise ValueError(f"secant stiffness needs d > 0, got {d}")
    return force_from_displacement(actuator, d) / d
