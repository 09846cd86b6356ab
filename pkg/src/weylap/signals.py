"""Signals: evaluable maps R -> R^n built from a small expression tree.

Every node is an immutable value. ``values(t)`` is the vectorised evaluator
and always returns an array of shape ``(len(t), dim)``; ``__call__`` is the
convenience form that squeezes scalar inputs and one-dimensional outputs.

Pulse edges are right-continuous: a pulse supported on ``[a, b)`` takes its
height at ``a`` and vanishes at ``b``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, ClassVar, Sequence

import numpy as np

from .errors import DimensionMismatch, NonIntegrableTail

NEG_INF = -math.inf

__all__ = [
    "Signal", "Constant", "PaperStep", "PulseTrain", "TrigSum", "ExpDecay",
    "Primitive", "Sum", "Scale", "Shift", "Sampled", "Composed",
    "ParametricSignal", "eval_signal", "primitive", "shift",
    "paper_step", "paper_primitive", "paper_ode_solution", "sine", "cosine",
    "zero", "constant", "from_spec", "load_signal", "dump_signal",
    "read_sampled_csv",
]


def _as_times(t) -> np.ndarray:
    return np.atleast_1d(np.asarray(t, dtype=float)).ravel()


def _breaks_in(points, lo, hi) -> np.ndarray:
    pts = np.asarray(points, dtype=float).ravel()
    pts = pts[np.isfinite(pts) & (pts >= lo) & (pts <= hi)]
    return np.unique(pts)


class Signal:
    """Base class of the expression tree."""

    kind: ClassVar[str] = "abstract"

    # -- evaluation --------------------------------------------------------
    def values(self, t) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        out = self.values(t)
        if self.dim == 1:
            out = out[:, 0]
            return float(out[0]) if scalar else out
        return out[0] if scalar else out

    # -- structure used by the quadrature layer ----------------------------
    def breaks(self, lo: float, hi: float) -> np.ndarray:
        """Discontinuities and kinks of the body inside ``[lo, hi]``."""
        return np.empty(0)

    def left_support(self) -> float | None:
        """Time before which the signal vanishes identically.

        ``-inf`` means identically zero; ``None`` means no such time is known.
        """
        return None

    def antiderivative(self, t) -> np.ndarray:
        """Some fixed antiderivative, evaluated at ``t``.

        Raises NotImplementedError when no closed form is available.
        """
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} is not serialisable")

    # -- algebra -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Constant((float(other),) * self.dim)
        return Sum((self, other))

    __radd__ = __add__

    def __neg__(self):
        return Scale(self, -1.0)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Constant((float(other),) * self.dim)
        return Sum((self, Scale(other, -1.0)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        return Scale(self, c)

    __rmul__ = __mul__

    def shifted(self, tau: float) -> "Signal":
        return Shift(self, float(tau))


@dataclass(frozen=True, eq=False)
class Constant(Signal):
    value: tuple[float, ...] = (0.0,)
    label: str = "constant"
    kind: ClassVar[str] = "constant"

    def __post_init__(self):
        object.__setattr__(self, "value", tuple(float(v) for v in np.atleast_1d(self.value)))

    @property
    def dim(self) -> int:
        return len(self.value)

    def values(self, t):
        t = _as_times(t)
        return np.broadcast_to(np.asarray(self.value), (t.size, self.dim)).copy()

    def left_support(self):
        return NEG_INF if not any(self.value) else None

    def antiderivative(self, t):
        t = _as_times(t)
        return t[:, None] * np.asarray(self.value)[None, :]

    def to_spec(self):
        return {"kind": self.kind, "params": {"value": list(self.value)}, "children": []}


@dataclass(frozen=True, eq=False)
class PaperStep(Signal):
    """Indicator of ``[0, 1/2)``: a single unit-height pulse of mass 1/2."""

    label: str = "step"
    kind: ClassVar[str] = "paper_step"
    dim: ClassVar[int] = 1

    def values(self, t):
        t = _as_times(t)
        return ((t >= 0.0) & (t < 0.5)).astype(float)[:, None]

    def breaks(self, lo, hi):
        return _breaks_in((0.0, 0.5), lo, hi)

    def left_support(self):
        return 0.0

    def antiderivative(self, t):
        return np.clip(_as_times(t), 0.0, 0.5)[:, None]

    def to_spec(self):
        return {"kind": self.kind, "params": {}, "children": []}


@dataclass(frozen=True, eq=False)
class PulseTrain(Signal):
    """Periodic pulses of the given height on ``[phase + kP, phase + kP + width)``."""

    period: float = 1.0
    width: float = 0.5
    height: float = 1.0
    phase: float = 0.0
    label: str = "pulse_train"
    kind: ClassVar[str] = "pulse_train"
    dim: ClassVar[int] = 1

    def __post_init__(self):
        if not (self.period > 0 and 0 <= self.width <= self.period):
            raise ValueError("pulse train needs period > 0 and 0 <= width <= period")

    def values(self, t):
        r = np.mod(_as_times(t) - self.phase, self.period)
        return (self.height * (r < self.width))[:, None].astype(float)

    def breaks(self, lo, hi):
        k0 = math.floor((lo - self.phase) / self.period) - 1
        k1 = math.ceil((hi - self.phase) / self.period) + 1
        starts = self.phase + self.period * np.arange(k0, k1 + 1)
        return _breaks_in(np.concatenate([starts, starts + self.width]), lo, hi)

    def antiderivative(self, t):
        s = _as_times(t) - self.phase
        k = np.floor(s / self.period)
        r = s - k * self.period
        return (self.height * (k * self.width + np.minimum(r, self.width)))[:, None]

    def to_spec(self):
        return {"kind": self.kind, "children": [],
                "params": {"period": self.period, "width": self.width,
                           "height": self.height, "phase": self.phase}}


@dataclass(frozen=True, eq=False)
class TrigSum(Signal):
    """``sum_k a_k sin(w_k t + phi_k)``; each ``a_k`` is a scalar or an n-vector."""

    amplitudes: tuple = (1.0,)
    omegas: tuple = (1.0,)
    phases: tuple = (0.0,)
    label: str = "trig_sum"
    kind: ClassVar[str] = "trig_sum"

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        if amps.ndim == 1:
            amps = amps[:, None]
        om = np.asarray(self.omegas, dtype=float).ravel()
        ph = np.asarray(self.phases, dtype=float).ravel()
        if not (amps.shape[0] == om.size == ph.size):
            raise ValueError("amplitudes, omegas and phases must have equal length")
        object.__setattr__(self, "_a", amps)
        object.__setattr__(self, "_w", om)
        object.__setattr__(self, "_phi", ph)

    @property
    def dim(self) -> int:
        return self._a.shape[1]

    def values(self, t):
        t = _as_times(t)
        return np.sin(np.outer(t, self._w) + self._phi) @ self._a

    def antiderivative(self, t):
        t = _as_times(t)
        arg = np.outer(t, self._w) + self._phi
        w = self._w
        safe = np.where(w == 0, 1.0, w)
        cols = np.where(w == 0, t[:, None] * np.sin(self._phi), -np.cos(arg) / safe)
        return cols @ self._a

    def to_spec(self):
        amps = self._a[:, 0].tolist() if self.dim == 1 else self._a.tolist()
        return {"kind": self.kind, "children": [],
                "params": {"amplitudes": amps, "omegas": self._w.tolist(),
                           "phases": self._phi.tolist()}}


@dataclass(frozen=True, eq=False)
class ExpDecay(Signal):
    """``amplitude * exp(-rate (t - start))`` on ``[start, end)``, zero elsewhere."""

    amplitude: float = 1.0
    rate: float = 1.0
    start: float = 0.0
    end: float = math.inf
    label: str = "exp_decay"
    kind: ClassVar[str] = "exp_decay"
    dim: ClassVar[int] = 1

    def __post_init__(self):
        if math.isinf(self.end) and self.rate <= 0:
            raise ValueError("an unbounded exp_decay piece needs rate > 0")

    def values(self, t):
        t = _as_times(t)
        on = (t >= self.start) & (t < self.end)
        arg = np.where(on, -self.rate * (t - self.start), 0.0)
        return np.where(on, self.amplitude * np.exp(arg), 0.0)[:, None]

    def breaks(self, lo, hi):
        return _breaks_in((self.start, self.end), lo, hi)

    def left_support(self):
        return self.start

    def antiderivative(self, t):
        s = np.clip(_as_times(t), self.start, self.end) - self.start
        if self.rate == 0:
            return (self.amplitude * s)[:, None]
        return (self.amplitude / self.rate * -np.expm1(-self.rate * s))[:, None]

    def to_spec(self):
        return {"kind": self.kind, "children": [],
                "params": {"amplitude": self.amplitude, "rate": self.rate,
                           "start": self.start,
                           "end": None if math.isinf(self.end) else self.end}}


_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)


def _numeric_integral(f: Signal, a: float, b: np.ndarray, density: int = 64) -> np.ndarray:
    """``int_a^{b_i} f`` for each ``b_i`` by composite Gauss-Legendre split at breaks."""
    b = np.asarray(b, dtype=float)
    out = np.zeros((b.size, f.dim))
    for i, bi in enumerate(b):
        lo, hi = (a, bi) if bi >= a else (bi, a)
        if hi == lo:
            continue
        n = max(1, math.ceil((hi - lo) * density))
        edges = np.unique(np.concatenate([np.linspace(lo, hi, n + 1), f.breaks(lo, hi)]))
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * np.diff(edges)
        nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
        w = (half[:, None] * _GL_W[None, :]).ravel()
        val = w @ f.values(nodes)
        out[i] = val if bi >= a else -val
    return out


@dataclass(frozen=True, eq=False)
class Primitive(Signal):
    """Running integral ``t -> int_anchor^t child``."""

    child: Signal = field(default_factory=PaperStep)
    anchor: float = NEG_INF
    label: str = "primitive"
    kind: ClassVar[str] = "primitive"

    def __post_init__(self):
        if self.anchor == NEG_INF and self.child.left_support() is None:
            raise NonIntegrableTail(
                f"cannot certify an integrable left tail for {self.child.label!r}")

    @property
    def dim(self):
        return self.child.dim

    def _effective_anchor(self):
        if self.anchor != NEG_INF:
            return self.anchor
        return self.child.left_support()

    def values(self, t):
        t = _as_times(t)
        a = self._effective_anchor()
        if a == NEG_INF:  # identically zero child
            return np.zeros((t.size, self.dim))
        try:
            out = self.child.antiderivative(t) - self.child.antiderivative(np.array([a]))
        except NotImplementedError:
            out = _numeric_integral(self.child, a, t)
        if self.anchor == NEG_INF:
            out[t < a] = 0.0
        return out

    def breaks(self, lo, hi):
        return self.child.breaks(lo, hi)

    def left_support(self):
        return self.child.left_support() if self.anchor == NEG_INF else None

    def to_spec(self):
        anchor = None if self.anchor == NEG_INF else self.anchor
        return {"kind": self.kind, "params": {"anchor": anchor},
                "children": [self.child.to_spec()]}


@dataclass(frozen=True, eq=False)
class Sum(Signal):
    children: tuple = ()
    label: str = "sum"
    kind: ClassVar[str] = "sum"

    def __post_init__(self):
        if not self.children:
            raise ValueError("sum needs at least one child")
        dims = {c.dim for c in self.children}
        if len(dims) != 1:
            raise DimensionMismatch(f"cannot add signals of dimensions {sorted(dims)}")

    @property
    def dim(self):
        return self.children[0].dim

    def values(self, t):
        t = _as_times(t)
        out = self.children[0].values(t)
        for c in self.children[1:]:
            out = out + c.values(t)
        return out

    def breaks(self, lo, hi):
        return np.unique(np.concatenate([c.breaks(lo, hi) for c in self.children]))

    def left_support(self):
        sup = [c.left_support() for c in self.children]
        if any(s is None for s in sup):
            return None
        return min(sup)

    def antiderivative(self, t):
        out = self.children[0].antiderivative(t)
        for c in self.children[1:]:
            out = out + c.antiderivative(t)
        return out

    def to_spec(self):
        return {"kind": self.kind, "params": {},
                "children": [c.to_spec() for c in self.children]}


@dataclass(frozen=True, eq=False)
class Scale(Signal):
    """``factor * child``; a vector factor lifts a 1-d child to n dimensions."""

    child: Signal = field(default_factory=PaperStep)
    factor: float | tuple = 1.0
    label: str = "scale"
    kind: ClassVar[str] = "scale"

    def __post_init__(self):
        fac = np.atleast_1d(np.asarray(self.factor, dtype=float))
        if fac.size > 1 and self.child.dim not in (1, fac.size):
            raise DimensionMismatch("vector factor does not match child dimension")
        object.__setattr__(self, "_fac", fac)

    @property
    def dim(self):
        return max(self.child.dim, self._fac.size)

    def values(self, t):
        return self.child.values(t) * self._fac[None, :]

    def breaks(self, lo, hi):
        return self.child.breaks(lo, hi)

    def left_support(self):
        if not self._fac.any():
            return NEG_INF
        return self.child.left_support()

    def antiderivative(self, t):
        return self.child.antiderivative(t) * self._fac[None, :]

    def to_spec(self):
        fac = float(self._fac[0]) if self._fac.size == 1 else self._fac.tolist()
        return {"kind": self.kind, "params": {"factor": fac},
                "children": [self.child.to_spec()]}


@dataclass(frozen=True, eq=False)
class Shift(Signal):
    """``t -> child(t + tau)``."""

    child: Signal = field(default_factory=PaperStep)
    tau: float = 0.0
    label: str = "shift"
    kind: ClassVar[str] = "shift"

    @property
    def dim(self):
        return self.child.dim

    def values(self, t):
        return self.child.values(_as_times(t) + self.tau)

    def breaks(self, lo, hi):
        return self.child.breaks(lo + self.tau, hi + self.tau) - self.tau

    def left_support(self):
        s = self.child.left_support()
        return None if s is None else s - self.tau

    def antiderivative(self, t):
        return self.child.antiderivative(_as_times(t) + self.tau)

    def shifted(self, tau):
        # fold nested shifts so repeated translation does not deepen the tree
        return Shift(self.child, self.tau + float(tau))

    def to_spec(self):
        return {"kind": self.kind, "params": {"tau": self.tau},
                "children": [self.child.to_spec()]}


@dataclass(frozen=True, eq=False)
class Sampled(Signal):
    """Piecewise-linear interpolant of samples; constant beyond the end nodes."""

    times: tuple = (0.0, 1.0)
    samples: tuple = ((0.0,), (0.0,))
    label: str = "sampled"
    kind: ClassVar[str] = "sampled"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        y = np.asarray(self.samples, dtype=float)
        if y.ndim == 1:
            y = y[:, None]
        if t.size < 2 or y.shape[0] != t.size:
            raise ValueError("sampled signal needs >= 2 nodes and one sample row per node")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "_y", y)
        seg = 0.5 * (y[1:] + y[:-1]) * np.diff(t)[:, None]
        object.__setattr__(self, "_cum", np.vstack([np.zeros((1, y.shape[1])),
                                                     np.cumsum(seg, axis=0)]))

    @property
    def dim(self):
        return self._y.shape[1]

    def values(self, t):
        t = _as_times(t)
        return np.column_stack([np.interp(t, self._t, self._y[:, j]) for j in range(self.dim)])

    def breaks(self, lo, hi):
        return _breaks_in(self._t, lo, hi)

    def left_support(self):
        return float(self._t[0]) if not self._y[0].any() else None

    def antiderivative(self, t):
        t = _as_times(t)
        tn, y = self._t, self._y
        tc = np.clip(t, tn[0], tn[-1])
        k = np.clip(np.searchsorted(tn, tc, side="right") - 1, 0, tn.size - 2)
        dt = (tc - tn[k])[:, None]
        h = (tn[k + 1] - tn[k])[:, None]
        slope = (y[k + 1] - y[k]) / h
        inner = self._cum[k] + y[k] * dt + 0.5 * slope * dt ** 2
        left = np.minimum(t - tn[0], 0.0)[:, None] * y[0]
        right = np.maximum(t - tn[-1], 0.0)[:, None] * y[-1]
        return inner + left + right

    def to_spec(self):
        samples = self._y[:, 0].tolist() if self.dim == 1 else self._y.tolist()
        return {"kind": self.kind, "children": [],
                "params": {"times": self._t.tolist(), "samples": samples}}


@dataclass(frozen=True, eq=False)
class ParametricSignal:
    """A map ``(t, u) -> R^n`` with a declared Lipschitz bound in ``u``.

    ``body`` is vectorised: it receives ``t`` of shape ``(N,)`` and ``u`` of
    shape ``(N, dim)`` and returns shape ``(N, dim)``. ``lipschitz`` is either
    a float (constant bound) or a scalar Signal ``L(t)``.
    """

    dim: int
    body: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lipschitz: float | Signal = 0.0
    breaks_fn: Callable[[float, float], np.ndarray] | None = None
    label: str = "parametric"

    def __call__(self, t, u):
        t = _as_times(t)
        u = np.asarray(u, dtype=float).reshape(t.size, self.dim)
        return np.asarray(self.body(t, u), dtype=float).reshape(t.size, self.dim)

    def breaks(self, lo, hi):
        if self.breaks_fn is None:
            return np.empty(0)
        return self.breaks_fn(lo, hi)

    @property
    def constant_lipschitz(self) -> bool:
        return not isinstance(self.lipschitz, Signal) or isinstance(self.lipschitz, Constant)

    def lipschitz_signal(self) -> Signal:
        if isinstance(self.lipschitz, Signal):
            return self.lipschitz
        return Constant((float(self.lipschitz),))

    def lipschitz_at(self, t) -> np.ndarray:
        t = _as_times(t)
        if isinstance(self.lipschitz, Signal):
            return np.abs(self.lipschitz.values(t)[:, 0])
        return np.full(t.size, float(self.lipschitz))

    def frozen(self, u) -> Signal:
        """The Signal ``t -> body(t, u)`` for a fixed state ``u``."""
        return Composed(self, Constant(tuple(np.atleast_1d(np.asarray(u, dtype=float)))))

    @classmethod
    def affine(cls, forcing: Signal | None = None, gain: float | Signal = 0.0,
               coupling: str = "sin", dim: int = 1, label: str = "parametric"):
        """``f(t, u) = forcing(t) + gain(t) * phi(u)`` with ``phi`` 1-Lipschitz.

        ``coupling`` is one of ``"sin"``, ``"tanh"``, ``"identity"``, ``"none"``.
        """
        phis = {"sin": np.sin, "tanh": np.tanh, "identity": lambda u: u,
                "none": np.zeros_like}
        if coupling not in phis:
            raise ValueError(f"unknown coupling {coupling!r}")
        phi = phis[coupling]
        gain_sig = gain if isinstance(gain, Signal) else None
        g0 = 0.0 if gain_sig is not None else float(gain)
        if coupling == "none":
            gain_sig, g0 = None, 0.0

        def body(t, u):
            out = phi(u) * (gain_sig.values(t) if gain_sig is not None else g0)
            if forcing is not None:
                out = out + forcing.values(t)
            return out

        def brk(lo, hi):
            parts = [np.empty(0)]
            if forcing is not None:
                parts.append(forcing.breaks(lo, hi))
            if gain_sig is not None:
                parts.append(gain_sig.breaks(lo, hi))
            return np.unique(np.concatenate(parts))

        lip = _Abs(gain_sig) if gain_sig is not None else abs(g0)
        ps = cls(dim=dim, body=body, lipschitz=lip, breaks_fn=brk, label=label)
        object.__setattr__(ps, "spec", {"forcing": None if forcing is None else forcing.to_spec(),
                                        "gain": g0 if gain_sig is None else gain_sig.to_spec(),
                                        "coupling": coupling})
        return ps


@dataclass(frozen=True, eq=False)
class _Abs(Signal):
    child: Signal = field(default_factory=PaperStep)
    label: str = "abs"
    kind: ClassVar[str] = "abs"

    @property
    def dim(self):
        return self.child.dim

    def values(self, t):
        return np.abs(self.child.values(t))

    def breaks(self, lo, hi):
        return self.child.breaks(lo, hi)


@dataclass(frozen=True, eq=False)
class Composed(Signal):
    """Superposition ``t -> f(t, x(t))`` of a parametric map and a signal."""

    outer: ParametricSignal = None
    inner: Signal = None
    label: str = "composed"
    kind: ClassVar[str] = "compose"

    def __post_init__(self):
        if self.outer.dim != self.inner.dim:
            raise DimensionMismatch("parametric map and inner signal differ in dimension")

    @property
    def dim(self):
        return self.outer.dim

    def values(self, t):
        t = _as_times(t)
        return self.outer(t, self.inner.values(t))

    def breaks(self, lo, hi):
        return np.unique(np.concatenate([self.outer.breaks(lo, hi), self.inner.breaks(lo, hi)]))


# -- operations -------------------------------------------------------------

def eval_signal(f: Signal, t: float) -> np.ndarray:
    """Value ``f(t)`` as an n-vector."""
    return f.values(np.array([float(t)]))[0]


def primitive(f: Signal, anchor: float = NEG_INF) -> Signal:
    return Primitive(f, float(anchor), label=f"primitive({f.label})")


def shift(f: Signal, tau: float) -> Signal:
    return f.shifted(tau)


def zero(dim: int = 1) -> Signal:
    return Constant((0.0,) * dim, label="zero")


def constant(c) -> Signal:
    return Constant(tuple(np.atleast_1d(np.asarray(c, dtype=float))))


def sine(omega: float = 1.0, amplitude: float = 1.0, phase: float = 0.0) -> Signal:
    return TrigSum((amplitude,), (omega,), (phase,), label="sin")


def cosine(omega: float = 1.0, amplitude: float = 1.0) -> Signal:
    return TrigSum((amplitude,), (omega,), (math.pi / 2,), label="cos")


def paper_step() -> Signal:
    """Unit pulse on ``[0, 1/2)``."""
    return PaperStep()


def paper_primitive() -> Signal:
    """Running integral of the unit pulse from -inf: 0, then t, then 1/2."""
    return Primitive(PaperStep(), NEG_INF, label="F")


def paper_ode_solution() -> Signal:
    """Bounded solution of ``x' = -x + step(t)`` in closed form.

    0 for t <= 0, ``1 - e^{-t}`` on (0, 1/2), ``(sqrt(e) - 1) e^{-t}`` after.
    """
    tail_amp = (math.sqrt(math.e) - 1.0) * math.exp(-0.5)
    return Sum((PaperStep(), ExpDecay(-1.0, 1.0, 0.0, 0.5),
                ExpDecay(tail_amp, 1.0, 0.5)), label="x")


# -- structured-text format ---------------------------------------------------

def read_sampled_csv(paths: str | Path | Sequence[str | Path]) -> Sampled:
    """Sampled signal from two-column ``t,value`` CSV files, one per dimension."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    times, cols = None, []
    for p in paths:
        rows = []
        with open(p, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError:
                    continue  # header line
        arr = np.asarray(rows)
        if times is None:
            times = arr[:, 0]
        elif arr.shape[0] != times.size or not np.allclose(arr[:, 0], times):
            raise ValueError("per-dimension CSV files must share the same time column")
        cols.append(arr[:, 1])
    return Sampled(tuple(times), tuple(map(tuple, np.column_stack(cols))), label=str(paths[0]))


def from_spec(spec: dict, base_dir: str | Path | None = None) -> Signal:
    """Build a Signal from a ``{kind, params, children}`` mapping."""
    kind = spec.get("kind")
    params = dict(spec.get("params") or {})
    children = [from_spec(c, base_dir) for c in spec.get("children") or []]
    label = spec.get("label")
    extra = {"label": label} if label else {}
    if kind == "constant":
        return Constant(tuple(np.atleast_1d(params.get("value", 0.0))), **extra)
    if kind == "paper_step":
        return PaperStep(**extra)
    if kind == "pulse_train":
        return PulseTrain(**params, **extra)
    if kind == "trig_sum":
        return TrigSum(tuple(params["amplitudes"]), tuple(params["omegas"]),
                       tuple(params.get("phases", [0.0] * len(params["omegas"]))), **extra)
    if kind == "exp_decay":
        end = params.get("end")
        return ExpDecay(params.get("amplitude", 1.0), params.get("rate", 1.0),
                        params.get("start", 0.0), math.inf if end is None else end, **extra)
    if kind == "primitive":
        anchor = params.get("anchor")
        return Primitive(children[0], NEG_INF if anchor is None else float(anchor), **extra)
    if kind == "sum":
        return Sum(tuple(children), **extra)
    if kind == "scale":
        fac = params.get("factor", 1.0)
        return Scale(children[0], tuple(fac) if isinstance(fac, list) else float(fac), **extra)
    if kind == "shift":
        return Shift(children[0], float(params.get("tau", 0.0)), **extra)
    if kind == "sampled":
        if "csv" in params:
            paths = params["csv"] if isinstance(params["csv"], list) else [params["csv"]]
            if base_dir is not None:
                paths = [Path(base_dir) / p for p in paths]
            return read_sampled_csv(paths)
        return Sampled(tuple(params["times"]), tuple(params["samples"]), **extra)
    raise ValueError(f"unknown signal kind {kind!r}")


def load_signal(path: str | Path) -> Signal:
    path = Path(path)
    with open(path) as fh:
        spec = json.load(fh)
    return from_spec(spec, base_dir=path.parent)


def dump_signal(f: Signal, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(f.to_spec(), fh, indent=2)
