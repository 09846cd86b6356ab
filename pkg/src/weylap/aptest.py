"""Translation numbers: distances, tau-scans, and the Bohr/Stepanov/Weyl ladder.

Relative density can only be observed on the scanned tau-range. A set is
reported with its largest gap (endpoints included) and is called relatively
dense when that gap does not exceed the policy's inclusion length.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULTS
from .errors import EmptyRange, InvalidExponent
from .quadrature import cell_edges, pmap
from .seminorms import ScanSpec, _pointwise_norm, stepanov_distance, window_averages
from .signals import Signal, shift

CONVENTIONS = ("classical", "ursell", "bohr")

# accept only when eps - distance exceeds this (strict inequality, robust to rounding)
TIE_TOL = 1e-12


def translation_distance(f: Signal, tau: float, p: float, l: float,
                         convention: str, scan: ScanSpec) -> float:
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    if p < 1:
        raise InvalidExponent(f"exponent p={p} must be >= 1")
    if tau == 0:
        return 0.0
    g = shift(f, tau)
    if convention == "classical":
        return stepanov_distance(g, f, p, l, scan).value
    if convention == "ursell":
        _, avg = window_averages(g - f, p, l, scan, starts=np.array([0.0]))
        return float(avg[0] ** (1.0 / p))
    lo, hi = scan.xi_min, scan.xi_max
    brk = np.concatenate([f.breaks(lo, hi), g.breaks(lo, hi)])
    probes = cell_edges(lo, hi, scan.quad_points_per_unit, brk)
    return float(_pointwise_norm(g.values(probes) - f.values(probes)).max())


@dataclass(frozen=True)
class TranslationQuery:
    eps: float
    p: float = 1.0
    l: float = 1.0
    convention: str = "classical"
    tau_min: float = 0.0
    tau_max: float = 50.0
    tau_step: float = 0.05
    scan: ScanSpec = field(default_factory=lambda: ScanSpec(-10.0, 10.0))

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {self.convention!r}")
        if not (self.tau_min < self.tau_max and self.tau_step > 0):
            raise EmptyRange("tau range must satisfy tau_min < tau_max and tau_step > 0")

    def taus(self) -> np.ndarray:
        n = int(math.floor((self.tau_max - self.tau_min) / self.tau_step + 1e-9))
        grid = self.tau_min + self.tau_step * np.arange(n + 1)
        if self.tau_min <= 0 <= self.tau_max and not np.any(grid == 0.0):
            grid = np.sort(np.append(grid, 0.0))
        if grid.size == 0:
            raise EmptyRange("no tau on the grid")
        return grid


@dataclass
class TranslationSet:
    query: TranslationQuery
    taus: np.ndarray
    distances: np.ndarray
    accepted: list
    rejected_count: int
    max_gap: float
    density_bound_k: float

    def relatively_dense(self, max_inclusion: float | None = None) -> bool:
        q = self.query
        if max_inclusion is None:
            max_inclusion = (q.tau_max - q.tau_min) / 4.0
        return bool(self.accepted) and self.density_bound_k <= max_inclusion

    @property
    def accepted_taus(self) -> np.ndarray:
        return np.array([t for t, _ in self.accepted])

    def to_dict(self) -> dict:
        q = self.query
        return {
            "eps": q.eps, "p": q.p, "l": q.l, "convention": q.convention,
            "tau_range": [q.tau_min, q.tau_max], "tau_step": q.tau_step,
            "accepted": [{"tau": float(t), "margin": float(m)} for t, m in self.accepted],
            "rejected_count": self.rejected_count,
            "max_gap": self.max_gap,
            "density_bound_k": self.density_bound_k if math.isfinite(self.density_bound_k) else None,
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau", "distance"])
            for t, d in zip(self.taus, self.distances):
                w.writerow([repr(float(t)), repr(float(d))])


def scan_translations(f: Signal, q: TranslationQuery, jobs: int = 1) -> TranslationSet:
    """Test every tau on the query grid for ``distance < eps``."""
    taus = q.taus()
    dist = np.array(pmap(lambda tau: translation_distance(f, float(tau), q.p, q.l,
                                                          q.convention, q.scan),
                         taus, jobs))
    margins = q.eps - dist
    ok = margins > TIE_TOL
    accepted = [(float(t), float(m)) for t, m, a in zip(taus, margins, ok) if a]
    if accepted:
        pts = np.concatenate([[q.tau_min], [t for t, _ in accepted], [q.tau_max]])
        max_gap = max(float(np.diff(pts).max()), q.tau_step)
        k = max_gap
    else:
        max_gap = k = math.inf
    return TranslationSet(q, taus, dist, accepted, int((~ok).sum()), max_gap, k)


@dataclass(frozen=True)
class ClassifyPolicy:
    scan: ScanSpec
    tau_min: float = 0.0
    tau_max: float = 50.0
    tau_step: float = 0.05
    l_schedule: tuple = tuple(2.0 ** k for k in range(11))
    stepanov_l: float = 1.0
    max_inclusion: float | None = None

    def inclusion(self) -> float:
        if self.max_inclusion is not None:
            return self.max_inclusion
        return (self.tau_max - self.tau_min) / 4.0

    def query(self, eps, p, l, convention) -> TranslationQuery:
        return TranslationQuery(eps, p, l, convention, self.tau_min, self.tau_max,
                                self.tau_step, self.scan)


@dataclass
class Classification:
    label: str
    bohr: TranslationSet
    stepanov: TranslationSet
    weyl: dict
    weyl_l: float | None
    is_bohr: bool
    is_stepanov: bool
    is_weyl: bool

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "is_bohr": self.is_bohr, "is_stepanov": self.is_stepanov, "is_weyl": self.is_weyl,
            "weyl_l": self.weyl_l,
            "bohr": self.bohr.to_dict(),
            "stepanov": self.stepanov.to_dict(),
            "weyl": {repr(float(l)): ts.to_dict() for l, ts in self.weyl.items()},
        }


def classify(f: Signal, eps: float, p: float, policy: ClassifyPolicy, jobs: int = 1) -> Classification:
    """Strongest of bohr > stepanov > weyl whose tau-set is relatively dense.

    The Weyl rung walks the window schedule and stops at the first window
    whose accepted set is relatively dense on the scanned range.
    """
    k = policy.inclusion()
    bohr = scan_translations(f, policy.query(eps, p, policy.stepanov_l, "bohr"), jobs)
    step = scan_translations(f, policy.query(eps, p, policy.stepanov_l, "classical"), jobs)
    weyl, weyl_l = {}, None
    for l in policy.l_schedule:
        ts = step if l == policy.stepanov_l else scan_translations(
            f, policy.query(eps, p, l, "classical"), jobs)
        weyl[float(l)] = ts
        if ts.relatively_dense(k):
            weyl_l = float(l)
            break
    is_b, is_s, is_w = bohr.relatively_dense(k), step.relatively_dense(k), weyl_l is not None
    label = "bohr" if is_b else "stepanov" if is_s else "weyl" if is_w else "unresolved"
    return Classification(label, bohr, step, weyl, weyl_l, is_b, is_s, is_w)


@dataclass
class AgreementResult:
    agree_fraction: float
    disagreements: list
    classical: TranslationSet
    ursell: TranslationSet

    def to_dict(self):
        return {"agree_fraction": self.agree_fraction,
                "disagreements": [float(t) for t in self.disagreements]}


def ursell_agreement(f: Signal, eps: float, p: float, l: float, scan: ScanSpec,
                     tau_min: float = 0.0, tau_max: float = 20.0, tau_step: float = 0.05,
                     jobs: int = 1) -> AgreementResult:
    """Fraction of grid taus on which the two conventions decide alike."""
    cq = TranslationQuery(eps, p, l, "classical", tau_min, tau_max, tau_step, scan)
    uq = TranslationQuery(eps, p, l, "ursell", tau_min, tau_max, tau_step, scan)
    c, u = scan_translations(f, cq, jobs), scan_translations(f, uq, jobs)
    ca = (eps - c.distances) > TIE_TOL
    ua = (eps - u.distances) > TIE_TOL
    same = ca == ua
    return AgreementResult(float(same.mean()), [float(t) for t in c.taus[~same]], c, u)
