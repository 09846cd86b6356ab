"""Classify a few signals on the bohr > stepanov > weyl ladder while eps varies.

Writes one CSV row per (signal, eps) with the label and the Weyl window found.

    python3 scripts/classification_ladder.py --out runs/ladder
"""

import argparse
import csv
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from weylap.aptest import ClassifyPolicy, classify
from weylap.seminorms import ScanSpec
from weylap.signals import cosine, paper_ode_solution, paper_primitive, paper_step, sine


@dataclass
class Config:
    out: str = "runs/ladder"
    p: float = 1.0
    eps: tuple = (0.05, 0.1, 0.2, 0.4)
    xi_min: float = -60.0
    xi_max: float = 10.0
    xi_step: float = 0.05
    tau_max: float = 50.0
    tau_step: float = 0.1
    signals: tuple = field(default=("sin", "sin+cos", "step", "primitive", "ode_solution"))
    jobs: int = 1


SIGNALS = {
    "sin": sine,
    "sin+cos": lambda: sine() + cosine() * 0.5,
    "step": paper_step,
    "primitive": paper_primitive,
    "ode_solution": paper_ode_solution,
}


def main(cfg: Config) -> None:
    pol = ClassifyPolicy(ScanSpec(cfg.xi_min, cfg.xi_max, cfg.xi_step),
                         tau_max=cfg.tau_max, tau_step=cfg.tau_step)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for name in cfg.signals:
        f = SIGNALS[name]()
        for eps in cfg.eps:
            t0 = time.perf_counter()
            c = classify(f, eps, cfg.p, pol, cfg.jobs)
            rows.append({"signal": name, "eps": eps, "label": c.label, "weyl_l": c.weyl_l,
                         "bohr_max_gap": c.bohr.max_gap, "stepanov_max_gap": c.stepanov.max_gap,
                         "seconds": round(time.perf_counter() - t0, 2)})
            print(rows[-1])
    with open(out / "ladder.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=Config.out)
    ap.add_argument("--p", type=float, default=Config.p)
    ap.add_argument("--eps", type=lambda s: tuple(float(x) for x in s.split(",")),
                    default=Config.eps)
    ap.add_argument("--jobs", type=int, default=Config.jobs)
    main(Config(**vars(ap.parse_args())))
