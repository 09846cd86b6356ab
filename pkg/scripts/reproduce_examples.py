"""Run the worked examples end to end and write their reports and CSV artifacts.

    python3 scripts/reproduce_examples.py --out runs/examples --jobs 1
"""

import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from weylap.config import DEFAULTS
from weylap.verify import verify_all


@dataclass
class Config:
    out: str = "runs/examples"
    seed: int = DEFAULTS.seed
    jobs: int = 1


def main(cfg: Config) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = verify_all(seed=cfg.seed, jobs=cfg.jobs)
    for rep in reports:
        rep.write_csvs(out)
        (out / f"{rep.case_id}.json").write_text(json.dumps(rep.to_dict(), indent=2, sort_keys=True))
        print(f"{rep.case_id}: {'PASS' if rep.passed else 'FAIL'}")
        for c in rep.checks:
            mark = "ok " if c.passed else "BAD"
            print(f"  [{mark}] {c.description}: {c.measured:.6g} (target {c.target:.6g} +/- {c.tol:g})")
        for n in rep.notes:
            print(f"  note: {n}")
    (out / "config.json").write_text(json.dumps(asdict(cfg), indent=2))
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for k, v in asdict(Config()).items():
        ap.add_argument(f"--{k}", type=type(v), default=v)
    raise SystemExit(main(Config(**vars(ap.parse_args()))))
