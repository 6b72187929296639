"""Reconstruct half-plane Blaschke products from their model spaces and report kernel residuals."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from krein_kernels import suites
from krein_kernels.rng import SplitMix64


@dataclass
class RoundTripConfig:
    seed: int = 0
    trials: int = 12
    max_zeros: int = 4


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=RoundTripConfig.seed)
    ap.add_argument("--trials", type=int, default=RoundTripConfig.trials)
    ap.add_argument("--max-zeros", type=int, default=RoundTripConfig.max_zeros)
    cfg = RoundTripConfig(**{k.replace("-", "_"): v for k, v in vars(ap.parse_args(argv)).items()})
    rng = SplitMix64(cfg.seed)
    print(f"{'n':>3} {'kernel residual':>16} {'slack inertia (+,-,0)':>22}")
    for t in range(cfg.trials):
        n = 1 + t % cfg.max_zeros
        zeros = [rng.halfplane_point(0.3, 2.5, 2.0) for _ in range(n)]
        res = suites.blaschke_roundtrip(zeros, rng.halfplane_point(0.3, 2.5, 2.0))
        si = res["slack_inertia"]
        print(f"{n:>3} {res['kernel_residual']:>16.3e} {str((si.n_plus, si.n_minus, si.n_zero)):>22}")


if __name__ == "__main__":
    main()
