"""Two-valued paraconsistent annotations and the 12-state Para-Analyser."""

from __future__ import annotations

import enum
from dataclasses import dataclass

# Threshold comparisons tolerate float noise from (mu - lam) on decimal grids.
EPS = 1e-9


def normalize_symbols(text: str) -> str:
    """Accept ASCII spellings TOP and BOT for the lattice symbols."""
    return text.replace("TOP", "⊤").replace("BOT", "⊥")


class LogicalState(enum.Enum):
    """The twelve lattice states, numbered as in the published state maps."""

    BOTTOM = (1, "⊥")
    QBOTTOM_F = (2, "Q⊥-F")
    QF_BOTTOM = (3, "QF-⊥")
    F = (4, "F")
    QF_TOP = (5, "QF-⊤")
    QTOP_F = (6, "Q⊤-F")
    TOP = (7, "⊤")
    QTOP_T = (8, "Q⊤-t")
    QT_TOP = (9, "Qt-⊤")
    T = (10, "t")
    QT_BOTTOM = (11, "Qt-⊥")
    QBOTTOM_T = (12, "Q⊥-t")

    def __init__(self, index: int, label: str) -> None:
        self.index = index
        self.label = label

    def __str__(self) -> str:
        return self.label

    @classmethod
    def from_index(cls, index: int) -> LogicalState:
        for state in cls:
            if state.index == index:
                return state
        raise ValueError(f"no logical state with index {index}")

    @classmethod
    def from_label(cls, label: str) -> LogicalState:
        wanted = normalize_symbols(label.strip())
        for state in cls:
            if wanted in (state.label, state.name):
                return state
        raise ValueError(f"unknown logical state label {label!r}")

    @property
    def is_extreme(self) -> bool:
        return self in _EXTREMES

    @property
    def mirror(self) -> LogicalState:
        """State obtained by reflecting the lattice about dc = 0 (t <-> F)."""
        return _MIRROR[self]


_EXTREMES = frozenset(
    {LogicalState.T, LogicalState.F, LogicalState.TOP, LogicalState.BOTTOM}
)

_MIRROR = {
    LogicalState.BOTTOM: LogicalState.BOTTOM,
    LogicalState.TOP: LogicalState.TOP,
    LogicalState.T: LogicalState.F,
    LogicalState.F: LogicalState.T,
    LogicalState.QT_TOP: LogicalState.QF_TOP,
    LogicalState.QF_TOP: LogicalState.QT_TOP,
    LogicalState.QT_BOTTOM: LogicalState.QF_BOTTOM,
    LogicalState.QF_BOTTOM: LogicalState.QT_BOTTOM,
    LogicalState.QTOP_T: LogicalState.QTOP_F,
    LogicalState.QTOP_F: LogicalState.QTOP_T,
    LogicalState.QBOTTOM_T: LogicalState.QBOTTOM_F,
    LogicalState.QBOTTOM_F: LogicalState.QBOTTOM_T,
}


@dataclass(frozen=True)
class EvidencePair:
    """Favourable (mu) and unfavourable (lam) evidence for one proposition."""

    mu: float
    lam: float

    def __post_init__(self) -> None:
        for name, value in (("mu", self.mu), ("lambda", self.lam)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class CertaintyPoint:
    dc: float
    dct: float

    def __post_init__(self) -> None:
        for name, value in (("dc", self.dc), ("dct", self.dct)):
            if not -1.0 - EPS <= value <= 1.0 + EPS:
                raise ValueError(f"{name} must lie in [-1, 1], got {value!r}")

    def to_evidence(self) -> EvidencePair:
        """Invert the degree transform: mu = (dc + dct + 1)/2, lam = (dct - dc + 1)/2."""
        mu = (self.dc + self.dct + 1.0) / 2.0
        lam = (self.dct - self.dc + 1.0) / 2.0
        return EvidencePair(min(max(mu, 0.0), 1.0), min(max(lam, 0.0), 1.0))


@dataclass(frozen=True)
class ControlValues:
    vcve: float = 0.5
    vcfa: float = -0.5
    vcic: float = 0.5
    vcpa: float = -0.5

    def __post_init__(self) -> None:
        if not self.vcfa < 0.0 < self.vcve:
            raise ValueError("control values need vcfa < 0 < vcve")
        if not self.vcpa < 0.0 < self.vcic:
            raise ValueError("control values need vcpa < 0 < vcic")


@dataclass(frozen=True)
class AnalyserResult:
    state: LogicalState
    point: CertaintyPoint
    # Set when a non-extreme point sits exactly on dct = 0; the state could be
    # read from either the ⊥ or the ⊤ half.
    boundary: bool = False

    @property
    def label(self) -> str:
        if self.boundary and not self.state.is_extreme:
            return f"{self.state.label}/⊤"
        return self.state.label


def compute_degrees(e: EvidencePair) -> CertaintyPoint:
    """Degree of certainty mu - lam and degree of contradiction mu + lam - 1."""
    return CertaintyPoint(e.mu - e.lam, e.mu + e.lam - 1.0)


def negate(e: EvidencePair) -> EvidencePair:
    return EvidencePair(e.lam, e.mu)


def classify_point(
    point: CertaintyPoint,
    cv: ControlValues | None = None,
    tie_break: str = "magnitude",
) -> AnalyserResult:
    """Run the Para-Analyser decision on an already-computed (dc, dct) point.

    ``tie_break="magnitude"`` separates certainty-dominant from
    contradiction-dominant near states with ``|dc| >= |dct|``;
    ``"signed"`` uses the literal ``dc >= dct`` comparison instead.
    """
    if tie_break not in ("magnitude", "signed"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    cv = cv or ControlValues()
    dc, dct = point.dc, point.dct

    state = None
    if dc >= cv.vcve - EPS:
        state = LogicalState.T
    if dc <= cv.vcfa + EPS:
        state = LogicalState.F
    if dct >= cv.vcic - EPS:
        state = LogicalState.TOP
    if dct <= cv.vcpa + EPS:
        state = LogicalState.BOTTOM
    if state is not None:
        return AnalyserResult(state, point)

    if tie_break == "signed":
        return AnalyserResult(_literal_quadrants(dc, dct, cv), point)

    on_dct_axis = abs(dct) <= EPS
    # dc == 0 falls to the F half, dct == 0 to the ⊥ half.
    truth_side = dc > EPS
    top_side = dct > EPS
    certainty_dominant = abs(dc) >= abs(dct) - EPS

    if truth_side:
        if top_side:
            state = LogicalState.QT_TOP if certainty_dominant else LogicalState.QTOP_T
        else:
            state = LogicalState.QT_BOTTOM if certainty_dominant else LogicalState.QBOTTOM_T
    else:
        if top_side:
            state = LogicalState.QF_TOP if certainty_dominant else LogicalState.QTOP_F
        else:
            state = LogicalState.QF_BOTTOM if certainty_dominant else LogicalState.QBOTTOM_F
    return AnalyserResult(state, point, boundary=on_dct_axis)


def _literal_quadrants(dc: float, dct: float, cv: ControlValues) -> LogicalState:
    # Non-extreme blocks in listed order, inclusive bounds, last write wins.
    state = LogicalState.QF_BOTTOM
    ge = dc >= dct
    if 0 <= dc < cv.vcve and 0 <= dct < cv.vcic:
        state = LogicalState.QT_TOP if ge else LogicalState.QTOP_T
    if 0 <= dc < cv.vcve and cv.vcpa < dct <= 0:
        state = LogicalState.QT_BOTTOM if ge else LogicalState.QBOTTOM_T
    if cv.vcfa < dc <= 0 and cv.vcpa < dct <= 0:
        state = LogicalState.QF_BOTTOM if ge else LogicalState.QBOTTOM_F
    if cv.vcfa < dc <= 0 and 0 <= dct < cv.vcic:
        state = LogicalState.QF_TOP if ge else LogicalState.QTOP_F
    return state


def para_analyser(
    e: EvidencePair,
    cv: ControlValues | None = None,
    tie_break: str = "magnitude",
) -> AnalyserResult:
    return classify_point(compute_degrees(e), cv, tie_break)
