"""Stepanov and Weyl seminorm estimators and the M*_p tail functional.

The supremum over window positions is taken over a finite xi-grid supplied by
the caller (:class:`ScanSpec`); the position attaining the maximum is reported
so the range can be widened when it sits on an edge.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULTS
from .errors import DegenerateScan, DimensionMismatch, InvalidExponent, NotConverged
from .quadrature import cumulative, signal_cells, window_integrals, xi_grid
from .signals import Signal


@dataclass(frozen=True)
class ScanSpec:
    """Finite stand-in for ``sup over xi in R``: window starts ``xi_min..xi_max``."""

    xi_min: float
    xi_max: float
    xi_step: float = DEFAULTS.xi_step
    quad_points_per_unit: int = DEFAULTS.quad_density

    def __post_init__(self):
        if not self.xi_min < self.xi_max:
            raise DegenerateScan(f"xi_min={self.xi_min} must be < xi_max={self.xi_max}")
        if not self.xi_step > 0:
            raise DegenerateScan("xi_step must be positive")
        if self.quad_points_per_unit < 16:
            raise DegenerateScan("quadrature density must be >= 16 points per unit")

    def grid(self) -> np.ndarray:
        xs = xi_grid(self.xi_min, self.xi_max, self.xi_step)
        if xs.size == 0:
            raise DegenerateScan("empty xi-grid")
        return xs

    def widened(self, by: float) -> "ScanSpec":
        return ScanSpec(self.xi_min - by, self.xi_max + by, self.xi_step,
                        self.quad_points_per_unit)

    def translated(self, by: float) -> "ScanSpec":
        return ScanSpec(self.xi_min + by, self.xi_max + by, self.xi_step,
                        self.quad_points_per_unit)

    @classmethod
    def parse(cls, text: str, density: int = DEFAULTS.quad_density) -> "ScanSpec":
        """Parse ``"min:max:step"`` (step optional)."""
        parts = [float(x) for x in text.split(":")]
        if len(parts) not in (2, 3):
            raise ValueError(f"scan {text!r} is not of the form min:max[:step]")
        return cls(*parts, quad_points_per_unit=density)


@dataclass
class SeminormEstimate:
    value: float
    p: float
    window_l: float
    argmax_xi: float
    converged: bool = True
    history: list = field(default_factory=list)
    schedule: dict | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["history"] = [list(map(float, h)) for h in self.history]
        return d

    def history_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["l", "estimate"])
            w.writerows(self.history)


def _check_p(p: float) -> None:
    if not p >= 1:
        raise InvalidExponent(f"exponent p={p} must be >= 1")


def _pointwise_norm(vals: np.ndarray) -> np.ndarray:
    return np.abs(vals[:, 0]) if vals.shape[1] == 1 else np.linalg.norm(vals, axis=1)


def window_averages(f: Signal, p: float, l: float, scan: ScanSpec,
                    transform: Callable[[np.ndarray], np.ndarray] | None = None,
                    starts: np.ndarray | None = None):
    """Window averages ``(1/l) int_xi^{xi+l} phi(|f|)`` for every xi on the grid.

    ``phi`` defaults to ``x -> x**p``. Returns ``(xs, averages)``.
    """
    if not l > 0:
        raise DegenerateScan(f"window length l={l} must be positive")
    xs = scan.grid() if starts is None else np.asarray(starts, dtype=float)
    edges, widths, vals = signal_cells(f, float(xs[0]), float(xs[-1]) + l,
                                       scan.quad_points_per_unit)
    mag = _pointwise_norm(vals)
    g = transform(mag) if transform is not None else mag ** p
    avg = window_integrals(edges, cumulative(edges, widths, g), xs, l) / l
    return xs, np.maximum(avg, 0.0)


def stepanov_norm(f: Signal, p: float, l: float, scan: ScanSpec) -> SeminormEstimate:
    """``max_xi ((1/l) int_xi^{xi+l} |f|^p)^{1/p}`` over the scan grid."""
    _check_p(p)
    xs, avg = window_averages(f, p, l, scan)
    i = int(np.argmax(avg))
    return SeminormEstimate(float(avg[i] ** (1.0 / p)), p, l, float(xs[i]))


def weyl_norm(f: Signal, p: float, scan: ScanSpec, l0: float = DEFAULTS.schedule_l0,
              factor: float = DEFAULTS.schedule_factor,
              max_windows: int = DEFAULTS.schedule_max_windows,
              tol: float = DEFAULTS.tol) -> SeminormEstimate:
    """Follow ``l_k = l0 * factor**k`` until consecutive estimates agree.

    Stops at the first k >= 1 with ``|e_k - e_{k-1}| <= tol * (1 + e_k)``.

    Raises:
        NotConverged: the schedule was exhausted; ``.history`` holds (l, e).
    """
    _check_p(p)
    if not (l0 > 0 and factor >= 2 and max_windows >= 2):
        raise ValueError("schedule needs l0 > 0, factor >= 2 and max_windows >= 2")
    schedule = {"l0": l0, "factor": factor, "max_windows": max_windows}
    history = []
    est = None
    for k in range(max_windows):
        l = l0 * factor ** k
        est = stepanov_norm(f, p, l, scan)
        history.append((l, est.value))
        if k >= 1:
            prev, last = history[-2][1], history[-1][1]
            if abs(last - prev) <= tol * (1.0 + last):
                return SeminormEstimate(last, p, l, est.argmax_xi, True, history, schedule)
    err = NotConverged(f"Weyl estimate did not settle within {max_windows} windows", history)
    err.estimate = SeminormEstimate(est.value, p, est.window_l, est.argmax_xi, False,
                                    history, schedule)
    raise err


def _difference(f: Signal, g: Signal) -> Signal:
    if f.dim != g.dim:
        raise DimensionMismatch(f"dimensions differ: {f.dim} vs {g.dim}")
    return f - g


def stepanov_distance(f: Signal, g: Signal, p: float, l: float, scan: ScanSpec) -> SeminormEstimate:
    return stepanov_norm(_difference(f, g), p, l, scan)


def truncated_distance(f: Signal, g: Signal, l: float, scan: ScanSpec) -> SeminormEstimate:
    """S^1_l distance measured with the truncated norm ``min(1, |.|)``."""
    xs, avg = window_averages(_difference(f, g), 1.0, l, scan,
                              transform=lambda m: np.minimum(1.0, m))
    i = int(np.argmax(avg))
    return SeminormEstimate(float(avg[i]), 1.0, l, float(xs[i]))


def top_mass(values: np.ndarray, measures: np.ndarray, budget: float) -> float:
    """Largest ``int_T g`` over sets T of measure <= budget, g cell-constant.

    Greedy on the sorted values; the last cell may be taken partially.
    """
    if budget <= 0 or values.size == 0:
        return 0.0
    order = np.argsort(-values, kind="stable")
    v, m = values[order], measures[order]
    cm = np.cumsum(m)
    full = int(np.searchsorted(cm, budget, side="right"))
    mass = float(np.dot(v[:full], m[:full]))
    if full < v.size:
        used = cm[full - 1] if full > 0 else 0.0
        mass += float(v[full]) * max(0.0, budget - used)
    return mass


def danilov_profile(f: Signal, p: float, delta_fraction: float, l: float, scan: ScanSpec):
    """Per-window values ``((1/l) sup_{|T| <= delta l} int_T |f|^p)^{1/p}``."""
    _check_p(p)
    if not 0 < delta_fraction < 1:
        raise ValueError("delta_fraction must lie in (0, 1)")
    xs = scan.grid()
    edges, widths, vals = signal_cells(f, float(xs[0]), float(xs[-1]) + l,
                                       scan.quad_points_per_unit)
    g = _pointwise_norm(vals) ** p
    budget = delta_fraction * l
    out = np.empty(xs.size)
    for j, xi in enumerate(xs):
        i0 = max(int(np.searchsorted(edges, xi, side="right")) - 1, 0)
        i1 = min(int(np.searchsorted(edges, xi + l, side="left")), widths.size)
        lo = np.maximum(edges[i0:i1], xi)
        hi = np.minimum(edges[i0 + 1:i1 + 1], xi + l)
        meas = np.maximum(hi - lo, 0.0)
        out[j] = (top_mass(g[i0:i1], meas, budget) / l) ** (1.0 / p)
    return xs, out


def danilov_tail(f: Signal, p: float, delta_fraction: float, l: float, scan: ScanSpec) -> float:
    """Max over the scan of the small-measure tail functional."""
    return float(danilov_profile(f, p, delta_fraction, l, scan)[1].max())


@dataclass
class DanilovResult:
    in_Mstar: bool
    history: list

    def to_dict(self):
        return {"in_Mstar": self.in_Mstar,
                "history": [{"l": l, "delta": d, "value": v} for l, d, v in self.history]}


def danilov_membership(f: Signal, p: float, schedule: Sequence[float],
                       delta_schedule: Sequence[float], scan: ScanSpec,
                       tol: float = DEFAULTS.tol) -> DanilovResult:
    """Evaluate the tail functional along the diagonal ``(l_k up, delta_k down)``.

    Membership holds when the last diagonal value is below ``tol``. A last
    value above ``tol`` counts as a decided non-membership only if the last
    two values agree to ``tol * (1 + last)``.

    Raises:
        NotConverged: neither outcome could be decided.
    """
    if not schedule or not delta_schedule:
        raise ValueError("schedules must be nonempty")
    if len(schedule) != len(delta_schedule):
        raise ValueError("window and delta schedules must have equal length")
    history = []
    for l, d in zip(schedule, delta_schedule):
        history.append((float(l), float(d), danilov_tail(f, p, d, l, scan)))
    last = history[-1][2]
    if last < tol:
        return DanilovResult(True, history)
    if len(history) >= 2 and abs(last - history[-2][2]) <= tol * (1.0 + last):
        return DanilovResult(False, history)
    raise NotConverged("diagonal tail estimates neither vanished nor settled", history)
