"""Tabulate how often the kernel of a random realization attains ind_-(P) negative squares."""

from __future__ import annotations

import argparse
from collections import Counter
from dataclasses import dataclass

from krein_kernels import suites


@dataclass
class ScanConfig:
    seed: int = 5
    draws: int = 100


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=ScanConfig.seed)
    ap.add_argument("--draws", type=int, default=ScanConfig.draws)
    cfg = ScanConfig(**vars(ap.parse_args(argv)))
    rows = suites.negative_squares_battery(cfg.seed, cfg.draws)["rows"]
    total, hit = Counter(), Counter()
    for r in rows:
        total[r["ind_p"]] += 1
        hit[r["ind_p"]] += int(r["kappas"][-1] == r["ind_p"])
    print(f"{'ind_-(P)':>9} {'draws':>6} {'attained':>9}")
    for k in sorted(total):
        print(f"{k:>9} {total[k]:>6} {hit[k]:>9}")
    bad = sum(any(k > r["ind_p"] for k in r["kappas"]) for r in rows)
    print(f"bound violations: {bad}")


if __name__ == "__main__":
    main()
