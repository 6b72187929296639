"""Run every acceptance battery at full size and print one pass/fail line per check."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from krein_kernels import suites


@dataclass
class AcceptanceConfig:
    seed: int = 1
    scale: float = 1.0


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=AcceptanceConfig.seed)
    ap.add_argument("--scale", type=float, default=AcceptanceConfig.scale)
    cfg = AcceptanceConfig(**vars(ap.parse_args(argv)))
    t0 = time.perf_counter()
    checks = suites.default_suite(cfg.seed, cfg.scale)
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name:40s} residual={c.residual:.3e} threshold={c.threshold:.0e}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} passed in {time.perf_counter() - t0:.1f}s")
    return int(failed > 0)


if __name__ == "__main__":
    sys.exit(main())
