from dataclasses import dataclass, field
from enum import Enum


class VarentropyError(Exception):
    pass


class MeasureKind(Enum):
    WPVE = "wpve"
    WRVE = "wrve"
    WPDVE = "wpdve"
    WPSE = "wpse"
    WRSE = "wrse"
    WPDE = "wpde"
    PVE = "pve"
    RVE = "rve"
    WPRE = "wpre"
    SE = "se"
    WSE = "wse"
    VE = "ve"
    WVE = "wve"
    CRHR = "crhr"
    CHR = "chr"
    MPL = "mpl"
    VPL = "vpl"
    MRL = "mrl"
    VRL = "vrl"

    @property
    def is_variance(self) -> bool:
        return self in _VARIANCE_KINDS


_VARIANCE_KINDS = frozenset({
    MeasureKind.WPVE, MeasureKind.WRVE, MeasureKind.WPDVE, MeasureKind.PVE,
    MeasureKind.RVE, MeasureKind.VE, MeasureKind.WVE, MeasureKind.VPL, MeasureKind.VRL,
})


@dataclass(frozen=True)
class MeasureResult:
    value: float
    abs_error_estimate: float
    kind: MeasureKind


class EstimateMethod(Enum):
    NONPARAMETRIC = "nonparametric"
    PARAMETRIC = "parametric"


@dataclass(frozen=True)
class EstimateResult:
    """A point estimate of a dynamic measure at time t.

    `auxiliary` holds the estimated past mass G(t) for kernel estimates and the
    fitted rate for parametric ones.
    """
    value: float
    method: EstimateMethod
    t: float
    auxiliary: float


class PreconditionStatus(Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    UNCHECKED = "unchecked"


class BoundSide(Enum):
    UPPER = "upper"
    LOWER = "lower"


SLACK_TOLERANCE = 1e-7


@dataclass
class BoundReport:
    name: str
    side: BoundSide
    bound: float
    exact: float
    slack: float
    satisfied: bool
    precondition: PreconditionStatus
    t: float
    details: dict[str, float] = field(default_factory=dict)

    @classmethod
    def upper(cls, name: str, *, bound: float, exact: float, t: float,
              precondition: PreconditionStatus, details: dict[str, float] | None = None) -> "BoundReport":
        return cls._build(name, BoundSide.UPPER, bound, exact, bound - exact, t, precondition, details)

    @classmethod
    def lower(cls, name: str, *, bound: float, exact: float, t: float,
              precondition: PreconditionStatus, details: dict[str, float] | None = None) -> "BoundReport":
        return cls._build(name, BoundSide.LOWER, bound, exact, exact - bound, t, precondition, details)

    @classmethod
    def _build(cls, name: str, side: BoundSide, bound: float, exact: float, slack: float, t: float,
               precondition: PreconditionStatus, details: dict[str, float] | None) -> "BoundReport":
        # NaN slack compares false, so an undefined bound is never satisfied
        satisfied = bool(slack >= -SLACK_TOLERANCE * max(1.0, abs(exact)))
        return cls(name=name, side=side, bound=bound, exact=exact, slack=slack, satisfied=satisfied,
                   precondition=precondition, t=t, details=dict(details or {}))

    @property
    def counts(self) -> bool:
        """Only reports whose precondition holds take part in pass/fail."""
        return self.precondition is PreconditionStatus.HOLDS
