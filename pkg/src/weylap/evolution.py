"""Exponentially stable semigroups on R^n and mild solutions of u' = Au + f.

The convolution ``int_b^t T(t-s) g(s) ds`` is evaluated on a uniform grid by
the exact variation-of-constants recursion

    U(t + h) = T(h) U(t) + int_t^{t+h} T(t + h - s) g(s) ds,

with the cell integral done by Gauss-Legendre (cells containing a breakpoint
of ``g`` are split there). The improper lower limit is cut at ``b`` chosen
from the exponential tail estimate, and the resulting bound is reported.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.signal import lfilter

from .config import DEFAULTS
from .errors import (HypothesisViolated, InvalidExponent, MaxIterExceeded, NegativeTime,
                     NotAContraction, StabilityViolation)
from .seminorms import ScanSpec, stepanov_norm
from .signals import Constant, ParametricSignal, Signal

_GX, _GW = np.polynomial.legendre.leggauss(3)
_GX = 0.5 * (_GX + 1.0)  # nodes on [0, 1]
_GW = 0.5 * _GW


@dataclass(frozen=True, eq=False)
class SemigroupSpec:
    """Generator of ``T(t) = exp(tA)`` with declared envelope ``|T(t)| <= M e^{-delta t}``.

    For ``scalar`` and ``diagonal`` kinds ``generator`` holds the diagonal of A.
    """

    kind: str
    generator: np.ndarray
    M: float
    delta: float

    def __post_init__(self):
        if self.kind not in ("scalar", "diagonal", "dense"):
            raise ValueError(f"unknown semigroup kind {self.kind!r}")
        if not (self.M >= 1 and self.delta > 0):
            raise ValueError("stability envelope needs M >= 1 and delta > 0")

    @classmethod
    def scalar(cls, a: float, delta: float | None = None) -> "SemigroupSpec":
        if a >= 0 and delta is None:
            raise ValueError("scalar generator must be negative")
        return cls("scalar", np.array([float(a)]), 1.0, -float(a) if delta is None else float(delta))

    @classmethod
    def diagonal(cls, lams: Sequence[float], delta: float | None = None) -> "SemigroupSpec":
        lams = np.asarray(lams, dtype=float).ravel()
        if delta is None:
            if lams.max() >= 0:
                raise ValueError("diagonal entries must be negative")
            delta = -float(lams.max())
        return cls("diagonal", lams, 1.0, float(delta))

    @classmethod
    def dense(cls, A, M: float, delta: float) -> "SemigroupSpec":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ValueError("generator matrix must be square")
        return cls("dense", A, float(M), float(delta))

    @property
    def n(self) -> int:
        return self.generator.shape[0]

    @property
    def is_diagonal(self) -> bool:
        return self.kind != "dense"

    def matrices(self, ts) -> np.ndarray:
        """``exp(t A)`` for each t, shape ``(len(ts), n, n)``."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if np.any(ts < 0):
            raise NegativeTime("semigroup evaluated at negative time")
        if self.is_diagonal:
            out = np.zeros((ts.size, self.n, self.n))
            idx = np.arange(self.n)
            out[:, idx, idx] = np.exp(np.outer(ts, self.generator))
            return out
        return expm(ts[:, None, None] * self.generator[None, :, :])

    def diag_factors(self, ts) -> np.ndarray:
        """``exp(t lambda_i)``, shape ``(len(ts), n)``; diagonal kinds only."""
        return np.exp(np.outer(np.atleast_1d(ts), self.generator))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "generator": self.generator.tolist(),
                "M": self.M, "delta": self.delta}


def semigroup_apply(S: SemigroupSpec, t: float, x) -> np.ndarray:
    """``exp(tA) x``."""
    if t < 0:
        raise NegativeTime(f"t={t} < 0")
    x = np.asarray(x, dtype=float).reshape(S.n)
    if t == 0:
        return x.copy()
    if S.is_diagonal:
        return np.exp(t * S.generator) * x
    return S.matrices([t])[0] @ x


@dataclass
class StabilityCheck:
    ok: bool
    worst_ratio: float
    worst_t: float


def verify_stability(S: SemigroupSpec, t_grid=None) -> StabilityCheck:
    """Compare ``|exp(tA)|_2`` against ``M e^{-delta t}`` on a t-grid."""
    if t_grid is None:
        t_grid = np.linspace(0.0, 20.0 / S.delta, 401)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0):
        raise NegativeTime("t_grid must lie in [0, inf)")
    if S.is_diagonal:
        norms = np.exp(np.outer(t_grid, S.generator)).max(axis=1)
    else:
        norms = np.linalg.norm(S.matrices(t_grid), ord=2, axis=(1, 2))
    ratio = norms / (S.M * np.exp(-S.delta * t_grid))
    i = int(np.argmax(ratio))
    return StabilityCheck(bool(ratio[i] <= 1.0 + 1e-8), float(ratio[i]), float(t_grid[i]))


def _require_stable(S: SemigroupSpec) -> None:
    chk = verify_stability(S)
    if not chk.ok:
        raise StabilityViolation(
            f"|exp(tA)| exceeds M e^(-delta t) by a factor {chk.worst_ratio:.6g} at t={chk.worst_t:.4g}")


def tail_horizon(M: float, delta: float, f_norm: float, tail_tol: float) -> float:
    """Smallest ``t - b`` with ``M |f|_{S^p_1} e^{-delta (t-b)} / (1 - e^{-delta}) <= tail_tol``."""
    if f_norm <= 0:
        return 0.0
    return max(0.0, math.log(M * f_norm / (-math.expm1(-delta) * tail_tol)) / delta)


def tail_bound(M: float, delta: float, f_norm: float, horizon: float) -> float:
    return M * f_norm * math.exp(-delta * horizon) / -math.expm1(-delta)


# -- convolution engine -------------------------------------------------------

def _convolve(S: SemigroupSpec, g_fn: Callable[[np.ndarray], np.ndarray],
              breaks: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """``U_i = int_{nodes[0]}^{nodes[i]} T(nodes[i] - s) g(s) ds`` on a uniform grid."""
    N = nodes.size - 1
    n = S.n
    U = np.zeros((N + 1, n))
    if N == 0:
        return U
    h = (nodes[-1] - nodes[0]) / N
    brk = np.asarray(breaks, dtype=float)
    brk = brk[(brk > nodes[0]) & (brk < nodes[-1])]
    split = np.zeros(N, dtype=bool)
    cell_of_break = np.clip(np.searchsorted(nodes, brk, side="right") - 1, 0, N - 1)
    on_node = np.isclose(brk, nodes[cell_of_break], rtol=0, atol=1e-12 * max(1.0, abs(h)))
    split[cell_of_break[~on_node]] = True

    # regular cells: fixed node offsets
    s = nodes[:-1, None] + h * _GX[None, :]
    gv = g_fn(s.ravel()).reshape(N, _GX.size, n)
    offsets = h * (1.0 - _GX)
    if S.is_diagonal:
        P = S.diag_factors(offsets)  # (q, n)
        c = h * np.einsum("j,ijk,jk->ik", _GW, gv, P)
    else:
        P = S.matrices(offsets)  # (q, n, n)
        c = h * np.einsum("j,jab,ijb->ia", _GW, P, gv)

    # split cells: Gauss on each piece, ad hoc propagators
    for i in np.flatnonzero(split):
        a, bnd = nodes[i], nodes[i + 1]
        pts = np.concatenate([[a], np.unique(brk[(brk > a) & (brk < bnd)]), [bnd]])
        lo, w = pts[:-1, None], np.diff(pts)[:, None]
        sn = (lo + w * _GX[None, :]).ravel()
        wn = (w * _GW[None, :]).ravel()
        gs = g_fn(sn)
        off = bnd - sn
        if S.is_diagonal:
            c[i] = np.einsum("j,jk,jk->k", wn, S.diag_factors(off), gs)
        else:
            c[i] = np.einsum("j,jab,jb->a", wn, S.matrices(off), gs)

    if S.is_diagonal:
        decay = np.exp(h * S.generator)
        for k in range(n):
            U[1:, k] = lfilter([1.0], [1.0, -decay[k]], c[:, k])
    else:
        E = S.matrices([h])[0]
        for i in range(N):
            U[i + 1] = E @ U[i] + c[i]
    return U


def _grid(b: float, t: float, density: int) -> np.ndarray:
    N = max(1, int(round((t - b) * density)))
    return t - (N - np.arange(N + 1)) / density


@dataclass
class PicardInfo:
    iterations: int
    residuals: list
    k_estimate: float
    k_bound: float

    def to_dict(self):
        return {"iterations": self.iterations, "residuals": [float(r) for r in self.residuals],
                "k_estimate": self.k_estimate, "k_bound": self.k_bound}


@dataclass
class MildSolution:
    """Solution samples on a uniform grid together with their error budget."""

    grid: np.ndarray
    values: np.ndarray
    tail_bound: float
    quad_tol: float
    picard: PicardInfo | None = None
    meta: dict = field(default_factory=dict)

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < self.grid[0] - 1e-12) or np.any(t > self.grid[-1] + 1e-12):
            raise ValueError("evaluation outside the solution grid")
        return np.column_stack([np.interp(t, self.grid, self.values[:, k])
                                for k in range(self.values.shape[1])])

    @property
    def sup_norm(self) -> float:
        return float(np.linalg.norm(self.values, axis=1).max())

    def certificate(self) -> dict:
        return {"tail_bound": self.tail_bound, "quad_tol": self.quad_tol,
                "picard": None if self.picard is None else self.picard.to_dict(),
                **self.meta}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + [f"u_{k + 1}" for k in range(self.values.shape[1])])
            for t, row in zip(self.grid, self.values):
                w.writerow([repr(float(t))] + [repr(float(v)) for v in row])


# -- linear problem -------------------------------------------------------------

def _forcing_norm(f: Signal, p: float, lo: float, hi: float, density: int) -> float:
    scan = ScanSpec(lo - 1.0, max(hi - 1.0, lo - 1.0 + 0.05), 0.05, density)
    return stepanov_norm(f, p, 1.0, scan).value


def _linear_on_grid(S, f: Signal, t0, t1, density, tail_tol, p, f_norm):
    if f.dim != S.n:
        raise ValueError(f"forcing dimension {f.dim} does not match generator size {S.n}")
    probe = 40.0 / S.delta
    if f_norm is None:
        f_norm = _forcing_norm(f, p, t0 - probe, t1, density)
        H = tail_horizon(S.M, S.delta, f_norm, tail_tol)
        if H > probe:
            f_norm = _forcing_norm(f, p, t0 - H, t1, density)
            H = tail_horizon(S.M, S.delta, f_norm, tail_tol)
    else:
        H = tail_horizon(S.M, S.delta, f_norm, tail_tol)
    n_tail = 2 * math.ceil(H * density / 2)
    b = t0 - n_tail / density

    def solve(dens):
        nodes = _grid(b, t1, dens)
        return nodes, _convolve(S, f.values, f.breaks(b, t1), nodes)

    nodes, U = solve(density)
    _, Uc = solve(density // 2)
    step = 2
    fine = U[::step][: Uc.shape[0]]
    keep = nodes[::step][: Uc.shape[0]] >= t0 - 1e-12
    qerr = float(np.abs(fine[keep] - Uc[keep]).max()) if keep.any() else 0.0
    mask = nodes >= t0 - 1e-12
    tb = tail_bound(S.M, S.delta, f_norm, t0 - b)
    return nodes[mask], U[mask], tb, qerr, f_norm, b


@dataclass
class LinearValue:
    value: np.ndarray
    tail_bound: float
    quad_tol: float
    f_norm: float
    lower_limit: float

    def to_dict(self):
        return {"value": self.value.tolist(), "tail_bound": self.tail_bound,
                "quad_tol": self.quad_tol, "f_norm_S1": self.f_norm,
                "lower_limit": self.lower_limit}


def linear_mild_solution(S: SemigroupSpec, f: Signal, t: float,
                         tail_tol: float = DEFAULTS.tail_tol,
                         density: int = DEFAULTS.quad_density, p: float = 1.0,
                         f_norm: float | None = None) -> LinearValue:
    """``u(t) = int_{-inf}^t T(t-s) f(s) ds`` with truncation and quadrature certificates.

    ``f_norm`` is a bound on ``|f|_{S^p_1}``; if omitted it is measured on the
    window preceding ``t`` that the truncation uses.

    Raises:
        StabilityViolation: the declared envelope of ``S`` fails.
    """
    _require_stable(S)
    nodes, U, tb, qerr, fn, b = _linear_on_grid(S, f, t, t, density, tail_tol, p, f_norm)
    return LinearValue(U[-1], tb, qerr, fn, b)


def linear_solution_on_grid(S: SemigroupSpec, f: Signal, t0: float, t1: float,
                            density: int = DEFAULTS.quad_density,
                            tail_tol: float = DEFAULTS.tail_tol, p: float = 1.0) -> MildSolution:
    _require_stable(S)
    nodes, U, tb, qerr, fn, b = _linear_on_grid(S, f, t0, t1, density, tail_tol, p, None)
    return MildSolution(nodes, U, tb, qerr, None, {"f_norm_S1": fn, "lower_limit": b})


def linear_solution_bound(S: SemigroupSpec, f: Signal, p: float, scan: ScanSpec) -> float:
    """``M |f|_{S^p_1} / (1 - e^{-delta})``: a sup-norm bound for the linear solution."""
    return S.M * stepanov_norm(f, p, 1.0, scan).value / -math.expm1(-S.delta)


# -- contraction conditions --------------------------------------------------------

def _conjugate(p: float) -> float:
    if p < 1:
        raise InvalidExponent(f"exponent p={p} must be >= 1")
    return math.inf if p == 1 else p / (p - 1.0)


def holder_factor(M: float, delta: float, p: float) -> float:
    """``(M^q / (delta q))^{1/q}``, with its q -> inf limit M at p = 1."""
    q = _conjugate(p)
    if math.isinf(q):
        return M
    return (M ** q / (delta * q)) ** (1.0 / q)


@dataclass
class ContractionResult:
    k: float
    threshold: float
    satisfied_13: bool

    def to_dict(self):
        return {"k": self.k, "threshold": self.threshold, "satisfied_13": self.satisfied_13}


def contraction_constant(M: float, delta: float, p: float, normL: float) -> ContractionResult:
    """Lipschitz constant of the solution operator and the admissible |L| bound."""
    threshold = 1.0 / (holder_factor(M, delta, p) * (1.0 / -math.expm1(-delta)))
    k = normL / threshold
    return ContractionResult(k, threshold, normL < threshold)


@dataclass
class WeylCondition:
    satisfied_14_or_15: bool
    bound: float

    def to_dict(self):
        return {"satisfied_14_or_15": self.satisfied_14_or_15, "bound": self.bound}


def weyl_condition_check(M: float, delta: float, p: float, normL: float) -> WeylCondition:
    """Bound on |L| under which the fixed point is also Weyl almost periodic (p >= 2)."""
    if p < 2:
        raise InvalidExponent(f"the Weyl condition needs p >= 2, got p={p}")
    if p == 2:
        bound = (p * delta / (8 * M ** 2)) * -math.expm1(-2 * delta / 4)
    else:
        bound = ((p * delta / (M ** p * 2 ** (p + 1))) * -math.expm1(-p * delta / 4)
                 * (p * delta / (2 * p - 4)) ** (p - 2))
    return WeylCondition(normL < bound, bound)


def gronwall_bound(alpha: float, betas: Sequence[float], deltas: Sequence[float]) -> float:
    """``alpha * delta / (delta - beta)``, delta = min(deltas), beta = sum(betas)."""
    if not deltas:
        raise ValueError("deltas must be nonempty")
    d, b = min(deltas), float(sum(betas))
    if not d > b:
        raise HypothesisViolated(f"need min(deltas)={d} > sum(betas)={b}")
    return alpha * d / (d - b)


# -- semilinear problem ------------------------------------------------------------

def lipschitz_norm(f: ParametricSignal, p: float, scan: ScanSpec) -> float:
    if not isinstance(f.lipschitz, Signal):
        return abs(float(f.lipschitz))
    if isinstance(f.lipschitz, Constant):
        return float(np.linalg.norm(f.lipschitz.value))
    return stepanov_norm(f.lipschitz, p, 1.0, scan).value


def _picard_run(S, f, nodes, density, max_iter, res_tol, k_bound):
    breaks = f.breaks(nodes[0], nodes[-1])
    n = S.n
    u = np.zeros((nodes.size, n))
    residuals = []
    for it in range(max_iter):
        cur = u

        def g_fn(s, cur=cur):
            us = np.column_stack([np.interp(s, nodes, cur[:, k]) for k in range(n)])
            return f(s, us)

        new = _convolve(S, g_fn, breaks, nodes)
        res = float(np.linalg.norm(new - u, axis=1).max())
        residuals.append(res)
        u = new
        if res <= res_tol:
            return u, residuals
    raise MaxIterExceeded(f"no convergence in {max_iter} Picard iterations "
                          f"(last residual {residuals[-1]:.3e})", residuals)


def picard_solve(S: SemigroupSpec, f: ParametricSignal, p: float, grid: tuple[float, float],
                 tail_tol: float = DEFAULTS.tail_tol, max_iter: int = DEFAULTS.max_iter,
                 res_tol: float = DEFAULTS.res_tol, density: int = DEFAULTS.quad_density,
                 scan: ScanSpec | None = None, quad_check: bool = True) -> MildSolution:
    """Fixed point of ``u -> int_{-inf}^t T(t-s) f(s, u(s)) ds`` by Picard iteration.

    Starts from ``u = 0``. Between grid nodes the iterate is interpolated
    linearly. ``quad_tol`` is the gap to a run at half the density.

    Raises:
        InvalidExponent: p < 2 with a time-dependent Lipschitz bound.
        NotAContraction: the contraction condition fails for |L|_{S^p}.
        MaxIterExceeded: residual did not fall below ``res_tol``.
    """
    t0, t1 = map(float, grid)
    if not t0 < t1:
        raise ValueError("grid must satisfy t0 < t1")
    if f.dim != S.n:
        raise ValueError("parametric map and generator differ in dimension")
    _require_stable(S)
    if p < 2 and not f.constant_lipschitz:
        raise InvalidExponent("p < 2 is only supported for a constant Lipschitz bound")
    if scan is None:
        scan = ScanSpec(t0 - 40.0 / S.delta, t1, 0.05, density)
    normL = lipschitz_norm(f, p, scan)
    cc = contraction_constant(S.M, S.delta, p, normL)
    if not cc.satisfied_13:
        raise NotAContraction(f"|L|={normL:.6g} is not below the threshold {cc.threshold:.6g}")
    f0 = stepanov_norm(f.frozen(np.zeros(S.n)), p, 1.0, scan).value
    gain = holder_factor(S.M, S.delta, p) / -math.expm1(-S.delta)
    radius = gain * f0 / (1.0 - cc.k)
    g_norm = normL * radius + f0
    H = tail_horizon(S.M, S.delta, g_norm, tail_tol)
    n_tail = 2 * math.ceil(H * density / 2)
    b = t0 - n_tail / density

    nodes = _grid(b, t1, density)
    u, residuals = _picard_run(S, f, nodes, density, max_iter, res_tol, cc.k)
    qerr = 0.0
    if quad_check:
        nodes_c = _grid(b, t1, density // 2)
        uc, _ = _picard_run(S, f, nodes_c, density // 2, max_iter, res_tol, cc.k)
        m = min(uc.shape[0], u[::2].shape[0])
        keep = nodes_c[:m] >= t0 - 1e-12
        qerr = float(np.abs(u[::2][:m][keep] - uc[:m][keep]).max())
    ratios = [r1 / r0 for r0, r1 in zip(residuals, residuals[1:]) if r0 > 0]
    info = PicardInfo(len(residuals), residuals, max(ratios) if ratios else 0.0, cc.k)
    mask = nodes >= t0 - 1e-12
    tb = tail_bound(S.M, S.delta, g_norm, t0 - b)
    return MildSolution(nodes[mask], u[mask], tb, qerr, info,
                        {"lipschitz_norm": normL, "lower_limit": b, "a_priori_radius": radius})


def gamma_operator(S: SemigroupSpec, f: ParametricSignal, nodes: np.ndarray,
                   u: np.ndarray) -> np.ndarray:
    """One application of the solution operator to grid values ``u`` (from ``nodes[0]``)."""
    n = S.n
    u = np.asarray(u, dtype=float).reshape(nodes.size, n)

    def g_fn(s):
        us = np.column_stack([np.interp(s, nodes, u[:, k]) for k in range(n)])
        return f(s, us)

    return _convolve(S, g_fn, f.breaks(nodes[0], nodes[-1]), nodes)


# -- translation diagnostic ---------------------------------------------------------

@dataclass
class DiagnosticResult:
    alpha0: float
    weighted: float
    horizon: float
    tail_bound: float

    def to_dict(self):
        return {"alpha0": self.alpha0, "weighted": self.weighted,
                "horizon": self.horizon, "tail_bound": self.tail_bound}


def _diag_tail(H, S, d1, gamma):
    a = H * math.exp(-d1 * S) / d1
    if abs(gamma - d1) < 1e-12:
        w = H * math.exp(-d1 * S) * (S / d1 + 1.0 / d1 ** 2)
    else:
        m = min(gamma, d1)
        w = H * math.exp(-m * S) / (m * abs(gamma - d1))
    return max(a, w)


def translation_diagnostic(f: ParametricSignal, u: MildSolution, tau: float, p: float,
                           l: float, delta1: float, gamma: float,
                           tail_tol: float = DEFAULTS.tail_tol,
                           density: int = DEFAULTS.quad_density) -> DiagnosticResult:
    """Exponentially weighted integrals of the window translation defect

    ``h(s) = (1/l) int_s^{s+l} |f(t + tau, u(t)) - f(t, u(t))|^p dt``:

    ``alpha0 = int_{-inf}^0 e^{delta1 s} h(s) ds`` and
    ``weighted = int_{-inf}^0 e^{gamma r} int_{-inf}^r e^{-delta1 (r - s)} h(s) ds dr``.
    """
    if not (delta1 > 0 and gamma > 0 and l > 0):
        raise ValueError("delta1, gamma and l must be positive")
    if p < 1:
        raise InvalidExponent(f"exponent p={p} must be >= 1")
    lo, hi = float(u.grid[0]), float(u.grid[-1])
    if hi < l:
        raise ValueError("solution grid must extend to t = l")
    from .quadrature import cell_edges, cumulative

    brk = np.concatenate([f.breaks(lo, hi), f.breaks(lo + tau, hi + tau) - tau])
    edges = cell_edges(lo, hi, density, brk)
    mids = 0.5 * (edges[1:] + edges[:-1])
    um = u(mids)
    defect = np.linalg.norm(f(mids + tau, um) - f(mids, um), axis=1) ** p
    cum = cumulative(edges, np.diff(edges), defect)

    def h(s):
        return np.maximum(np.interp(s + l, edges, cum) - np.interp(s, edges, cum), 0.0) / l

    s_avail = -(lo)
    H = float(h(np.linspace(lo, 0.0, 2049)).max()) if s_avail > 0 else 0.0
    if H == 0.0:
        return DiagnosticResult(0.0, 0.0, 0.0, 0.0)
    S_req = 1.0
    while _diag_tail(H, S_req, delta1, gamma) > tail_tol:
        S_req *= 1.25
    if S_req > s_avail:
        raise ValueError(f"solution grid must reach back to t = {-S_req:.3f}")
    n_cells = max(1, math.ceil(S_req * 32))
    e = np.linspace(-S_req, 0.0, n_cells + 1)
    w = np.diff(e)[:, None]
    s = (e[:-1, None] + w * _GX[None, :]).ravel()
    ws = (w * _GW[None, :]).ravel()
    hv = h(s)
    alpha0 = float(np.dot(ws, np.exp(delta1 * s) * hv))
    if abs(gamma - delta1) < 1e-12:
        kern = -s * np.exp(delta1 * s)
    else:
        kern = (np.exp(delta1 * s) - np.exp(gamma * s)) / (gamma - delta1)
    weighted = float(np.dot(ws, kern * hv))
    return DiagnosticResult(alpha0, weighted, S_req, _diag_tail(H, S_req, delta1, gamma))
