"""Default numerical settings shared by the library, CLI and acceptance runs."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Defaults:
    quad_density: int = 256
    tol: float = 1e-4
    schedule_l0: float = 1.0
    schedule_factor: float = 2.0
    schedule_max_windows: int = 16
    xi_step: float = 0.01
    tail_tol: float = 1e-6
    res_tol: float = 1e-10
    max_iter: int = 200
    probe_pairs: int = 10_000
    seed: int = 20240101
    jobs: int = 1


DEFAULTS = Defaults()
