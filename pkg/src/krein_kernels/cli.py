"""Batch driver: ``krein-kernels <command> [--input PATH] [--seed N] [--tol X] [--output PATH] [--dump-gram]``.

Commands: verify-identities, random-colligation, kernel-report,
construct-schur, classify-region, quaternion-suite. Every command writes a
JSON report with per-check ``{name, paper_anchor, residual, pass}`` records
and a summary. Exit status is 0 when every check passes, 1 when any check
fails and 2 on input errors.

Input conventions: complex numbers as ``[re, im]`` (plain reals allowed),
quaternions as ``[x0, x1, x2, x3]``, matrices as row-major nested arrays,
metrics as signature lists such as ``[1, 1, -1]``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import suites
from .errors import KreinKernelsError, ParseError
from .indefinite_linalg import Metric, inertia
from .kernel_spaces import PointChoice, Setting, kernel_gram
from .rng import SplitMix64
from .sampling import blaschke_kernel, random_colligation, random_points
from .schur_realization import (
    Colligation,
    FiniteModelSpace,
    construct_from_space,
    kernel_colligation,
    kernel_direct,
    model_space_from_kernel,
    negative_squares_of_S,
)
from .quaternion_core import Quaternion
from .quaternion_schur import kernel_forms_residual, proof_identity_residual
from .unified_setting import ABPair, DiskDomain, RectDomain, random_j0_unitary

COMMANDS = ("verify-identities", "random-colligation", "kernel-report", "construct-schur",
            "classify-region", "quaternion-suite")
DEFAULT_INPUTS = {
    "verify-identities": "default_suite.json",
    "construct-schur": "blaschke_model.json",
    "kernel-report": "kernel_report.json",
    "random-colligation": "random_colligation.json",
    "classify-region": "classify_region.json",
    "quaternion-suite": "quaternion_suite.json",
}
THREADS_ENV = "KREIN_KERNELS_THREADS"


@dataclass(frozen=True)
class JobSpec:
    command: str
    input: str | None = None
    seed: int = 1
    tol: float | None = None
    output: str | None = None
    dump_gram: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParseError(f"unknown command {self.command!r}")
        if self.tol is not None and not self.tol > 0:
            raise ParseError("tol must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ParseError("seed must be a 64-bit unsigned integer")


# --- parsing helpers -----------------------------------------------------------

def parse_complex(x) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise ParseError(f"expected a complex number [re, im], got {x!r}")


def parse_quaternion(x) -> Quaternion:
    if isinstance(x, list) and len(x) == 4 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return Quaternion(*map(float, x))
    raise ParseError(f"expected a quaternion [x0, x1, x2, x3], got {x!r}")


def parse_matrix(x, shape: tuple[int, int] | None = None) -> np.ndarray:
    if not isinstance(x, list):
        raise ParseError("matrices must be nested lists")
    rows = [[parse_complex(v) for v in row] if isinstance(row, list) and (not row or isinstance(row[0], (list, int, float)))
            else None for row in x]
    if any(r is None for r in rows) or len({len(r) for r in rows}) > 1:
        raise ParseError("matrix rows must be lists of equal length")
    M = np.array(rows, dtype=complex).reshape(len(rows), len(rows[0]) if rows else 0)
    if shape is not None and M.size == 0:
        M = M.reshape(shape)
    if shape is not None and M.shape != shape:
        raise ParseError(f"matrix has shape {M.shape}, expected {shape}")
    return M


def parse_signature(x) -> Metric:
    """Signature list ``[1, -1, ...]``, or a full Hermitian Gram matrix as nested lists."""
    if isinstance(x, list) and x and all(isinstance(v, list) and v and isinstance(v[0], list) for v in x):
        g = parse_matrix(x)
        if g.shape[0] != g.shape[1] or np.max(np.abs(g - g.conj().T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(g))):
            raise ParseError("metric Gram matrix must be square and Hermitian")
        return Metric(g)
    if not isinstance(x, list) or any(v not in (1, -1) or isinstance(v, bool) for v in x):
        raise ParseError(f"metrics are signature lists of +-1 or Gram matrices, got {x!r}")
    return Metric.from_signature(x)


def serialize_metric(m: Metric):
    return m.signature if m.is_canonical else _mat(m.gram)


def parse_setting(x) -> Setting:
    try:
        return Setting(x)
    except ValueError:
        raise ParseError(f"setting must be 'disk' or 'half_plane', got {x!r}") from None


def parse_colligation(d: dict) -> Colligation:
    try:
        mp, md, mc = (parse_signature(d[k]) for k in ("metric_P", "metric_D", "metric_C"))
        n, dd, c = mp.dim, md.dim, mc.dim
        return Colligation(parse_matrix(d["T"], (n, n)), parse_matrix(d["F"], (n, dd)),
                           parse_matrix(d["G"], (c, n)), parse_matrix(d["H"], (c, dd)),
                           mp, md, mc, parse_complex(d.get("alpha", 0.0)))
    except KeyError as e:
        raise ParseError(f"colligation is missing field {e}") from None


def parse_ab(d: dict) -> ABPair:
    try:
        a = [parse_complex(v) for v in d["a"]]
        b = [parse_complex(v) for v in d["b"]]
    except KeyError as e:
        raise ParseError(f"(a, b) pair is missing field {e}") from None
    dom = d.get("domain")
    domain = None
    if dom is not None:
        if "rect" in dom:
            domain = RectDomain(*map(float, dom["rect"]))
        elif "disk" in dom:
            domain = DiskDomain(parse_complex(dom["disk"][0]), float(dom["disk"][1]))
        else:
            raise ParseError("domain must be {'rect': [...]} or {'disk': [center, radius]}")
    return ABPair(a, b, domain)


def _cx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _mat(M: np.ndarray) -> list:
    return [[_cx(complex(v)) for v in row] for row in np.asarray(M)]


def serialize_colligation(c: Colligation) -> dict:
    return {"T": _mat(c.T), "F": _mat(c.F), "G": _mat(c.G), "H": _mat(c.H),
            "metric_P": serialize_metric(c.metric_P), "metric_D": serialize_metric(c.metric_D),
            "metric_C": serialize_metric(c.metric_C), "alpha": _cx(c.base_point)}


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_finite(v) for v in x]
    return x


# --- commands --------------------------------------------------------------------

def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ParseError(f"{THREADS_ENV} must be a positive integer") from None
    if n < 1:
        raise ParseError(f"{THREADS_ENV} must be a positive integer")
    return n


def cmd_verify_identities(cfg: dict, job: JobSpec):
    scale = float(cfg.get("scale", 1.0))
    if not scale > 0:
        raise ParseError("scale must be positive")
    s = lambda n: max(1, int(round(n * scale)))  # noqa: E731
    seed = job.seed
    batteries: list[Callable[[], list]] = [
        lambda: suites.resolvent_identity(seed, s(100)),
        lambda: suites.hardy_identities(seed + 1, s(50)),
        lambda: suites.kernel_equality(seed + 2, s(20), s(20)),
        lambda: suites.construction_roundtrip(seed + 3, s(8)),
        lambda: suites.negative_squares_checks(seed + 4, s(100)),
        lambda: suites.quaternion_checks(seed + 5, s(100)),
        lambda: suites.unified_checks(seed + 6, s(20)),
    ]
    # batteries are independent and seeded separately; map keeps their order
    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        results = list(ex.map(lambda f: f(), batteries))
    return [c for group in results for c in group], {"scale": scale}


def _kernel_checks(c: Colligation, setting: Setting, pts: list[complex]) -> tuple[list, np.ndarray]:
    worst = herm = 0.0
    for z in pts:
        for w in pts:
            Kd = kernel_direct(c, setting, z, w)
            worst = max(worst, float(np.max(np.abs(Kd - kernel_colligation(c, setting, z, w)))))
            J = c.metric_C.gram
            herm = max(herm, float(np.max(np.abs(J @ Kd - (J @ kernel_direct(c, setting, w, z)).conj().T))))
    anchor = suites.ANCHORS["kernel_disk" if setting is Setting.DISK else "kernel_halfplane"]
    kappa = negative_squares_of_S(c, setting, PointChoice(pts))
    G = kernel_gram(lambda z, w: kernel_direct(c, setting, z, w), PointChoice(pts), c.metric_C)
    checks = [
        suites.Check("coisometry", "M M^[*] = I for M = [[T, F], [G, H]]",
                     float(np.max(np.abs(c.block.matrix @ _adj(c) - np.eye(c.block.shape[0])), initial=0.0)), 1e-8),
        suites.Check("kernel_equality", anchor, worst, 1e-9),
        suites.Check("kernel_hermitian", "J K(z,w) = (J K(w,z))^*", herm, 1e-9),
        suites.Check("kappa_bound", suites.ANCHORS["kappa_bound"], float(max(0, kappa - c.kappa_bound)), 0.5),
    ]
    return checks, G


def _adj(c: Colligation) -> np.ndarray:
    from .indefinite_linalg import indef_adjoint
    return indef_adjoint(c.block).matrix


def cmd_random_colligation(cfg: dict, job: JobSpec):
    rng = SplitMix64(job.seed)
    setting = parse_setting(cfg.get("setting", "disk"))
    dim_p, ind_p = int(cfg.get("dim_p", 4)), int(cfg.get("ind_p", 1))
    dim_c, ind_c = int(cfg.get("dim_c", 1)), int(cfg.get("ind_c", 0))
    if not (0 <= ind_p <= dim_p and 0 <= ind_c <= dim_c and dim_c >= 1):
        raise ParseError("need 0 <= ind_p <= dim_p and 0 <= ind_c <= dim_c, dim_c >= 1")
    alpha = parse_complex(cfg.get("alpha", 0.0 if setting is Setting.DISK else 1.0))
    c = random_colligation(rng, dim_p, ind_p, dim_c, ind_c, alpha=alpha, scale=float(cfg.get("scale", 0.5)))
    pts = random_points(rng, setting, int(cfg.get("points", max(dim_p + 2, 4))))
    checks, G = _kernel_checks(c, setting, pts)
    kappa = negative_squares_of_S(c, setting, PointChoice(pts))
    return checks, {"colligation": serialize_colligation(c), "setting": setting.value,
                    "points": [_cx(z) for z in pts], "kappa": kappa, "gram": G}


def cmd_kernel_report(cfg: dict, job: JobSpec):
    if "colligation" not in cfg:
        raise ParseError("kernel-report needs a 'colligation' object")
    c = parse_colligation(cfg["colligation"])
    setting = parse_setting(cfg.get("setting", "disk"))
    if "points" in cfg:
        pts = [parse_complex(z) for z in cfg["points"]]
    else:
        pts = random_points(SplitMix64(job.seed), setting, int(cfg.get("n_points", 8)))
    if not pts:
        raise ParseError("need at least one point")
    checks, G = _kernel_checks(c, setting, pts)
    kappa = negative_squares_of_S(c, setting, PointChoice(pts))
    return checks, {"setting": setting.value, "points": [_cx(z) for z in pts], "kappa": kappa,
                    "ind_minus_P": c.kappa_bound, "gram": G}


def cmd_construct_schur(cfg: dict, job: JobSpec):
    zeros = None
    if "blaschke_zeros" in cfg:
        zeros = [parse_complex(z) for z in cfg["blaschke_zeros"]]
        alpha = parse_complex(cfg.get("alpha", 1.0))
        m = model_space_from_kernel(blaschke_kernel(zeros), zeros, alpha)
    elif "model_space" in cfg:
        d = cfg["model_space"]
        try:
            gram = parse_matrix(d["gram"])
            n = gram.shape[0]
            cm = parse_signature(d.get("coeff_metric", [1]))
            m = FiniteModelSpace(gram, parse_matrix(d["A_alpha"], (n, n)), parse_matrix(d["E_alpha"], (cm.dim, n)),
                                 cm, parse_complex(d["alpha"]))
        except KeyError as e:
            raise ParseError(f"model_space is missing field {e}") from None
        if "reference_zeros" in cfg:
            zeros = [parse_complex(z) for z in cfg["reference_zeros"]]
    else:
        raise ParseError("construct-schur needs 'blaschke_zeros' or 'model_space'")
    c = construct_from_space(m, job.tol or 1e-10)
    audit = c.audit
    si = audit["slack_inertia"]
    checks = [
        suites.Check("slack_psd", suites.ANCHORS["construction"], float(si.n_minus), 0.5),
        suites.Check("coisometry", "M M^[*] = I for M = [[T, F], [G, H]]",
                     float(np.max(np.abs(c.block.matrix @ _adj(c) - np.eye(c.block.shape[0])), initial=0.0)), 1e-8),
        suites.Check("index_C1_equals_index_C", "ind_-(C_1) = ind_-(C)",
                     float(abs(audit["ind_minus_C1"] - audit["ind_minus_C"])), 0.5),
    ]
    data = {"k": audit["k"], "slack_inertia": list(si), "dim_C1": audit["metric_C1"].dim,
            "colligation": serialize_colligation(c)}
    if zeros is not None:
        grid = suites.blaschke_grid()
        K = blaschke_kernel(zeros)
        worst = max(float(np.max(np.abs(kernel_colligation(c, Setting.HALF_PLANE, z, w) - K(z, w))))
                    for z in grid for w in grid)
        checks.append(suites.Check("kernel_match", suites.ANCHORS["construction"], worst, 1e-8))
        checks.append(suites.Check("slack_zero_for_isometric_inclusion", suites.ANCHORS["slack"],
                                   float(si.n_plus + si.n_minus), 0.5))
        data["gram"] = kernel_gram(lambda z, w: kernel_colligation(c, Setting.HALF_PLANE, z, w),
                                   PointChoice(grid), c.metric_C)
    return checks, data


def cmd_classify_region(cfg: dict, job: JobSpec):
    ab = parse_ab(cfg)
    pts = [parse_complex(z) for z in cfg.get("points", [])]
    rng = SplitMix64(job.seed)
    inv = 0.0
    mismatch = 0
    for _ in range(int(cfg.get("rerepresentations", 20))):
        ab2 = ab.rerepresent(random_j0_unitary(rng))
        for z in pts:
            for w in pts:
                inv = max(inv, abs(ab.rho(z, w) - ab2.rho(z, w)) / max(1.0, abs(ab.rho(z, w))))
            if abs(abs(ab.b(z)) - abs(ab.a(z))) > 1e-8:
                mismatch += int(ab.classify(z) != ab2.classify(z))
    checks = [suites.Check("rho_invariance", suites.ANCHORS["rho_invariance"], inv, 1e-10),
              suites.Check("classification_invariance_mismatches", suites.ANCHORS["rho_invariance"],
                           float(mismatch), 0.5)]
    data = {"classification": [{"point": _cx(z), "region": ab.classify(z).name,
                                "rho": _cx(complex(ab.rho(z, z)))} for z in pts]}
    return checks, data


def cmd_quaternion_suite(cfg: dict, job: JobSpec):
    draws = int(cfg.get("draws", 100))
    if draws < 1:
        raise ParseError("draws must be positive")
    checks = suites.quaternion_checks(job.seed, draws)
    pts = [parse_quaternion(q) for q in cfg.get("points", [])]
    if any(q.real <= 0 for q in pts):
        raise ParseError("quaternion points must lie in the right half-space Re p > 0")
    if pts:
        forms = max(kernel_forms_residual(p, q) for p in pts for q in pts)
        proof = max(proof_identity_residual(p, q) for p in pts for q in pts)
        checks += [suites.Check("q_kernel_forms[input_points]", suites.ANCHORS["q_kernel_forms"], forms, 1e-12),
                   suites.Check("q_proof_identity[input_points]", suites.ANCHORS["q_proof_identity"], proof, 1e-12)]
    return checks, {"draws": draws, "points": [list(q.as_array()) for q in pts]}


HANDLERS = {
    "verify-identities": cmd_verify_identities,
    "random-colligation": cmd_random_colligation,
    "kernel-report": cmd_kernel_report,
    "construct-schur": cmd_construct_schur,
    "classify-region": cmd_classify_region,
    "quaternion-suite": cmd_quaternion_suite,
}


def load_input(job: JobSpec) -> dict:
    try:
        if job.input is None:
            text = resources.files("krein_kernels.data").joinpath(DEFAULT_INPUTS[job.command]).read_text()
        else:
            text = Path(job.input).read_text()
        cfg = json.loads(text)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot read input: {e}") from None
    if not isinstance(cfg, dict):
        raise ParseError("input must be a JSON object")
    return cfg


def build_report(job: JobSpec) -> tuple[dict, np.ndarray | None]:
    cfg = load_input(job)
    checks, data = HANDLERS[job.command](cfg, job)
    if job.tol is not None:
        checks = [suites.Check(c.name, c.anchor, c.residual, job.tol) for c in checks]
    gram = data.pop("gram", None) if isinstance(data, dict) else None
    records = [c.as_dict() for c in checks]
    n_pass = sum(r["pass"] for r in records)
    report = {
        "command": job.command,
        "seed": job.seed,
        "tol": job.tol,
        "checks": records,
        "summary": {"total": len(records), "passed": n_pass, "failed": len(records) - n_pass},
        "data": data,
    }
    return _finite(report), gram


def write_gram_csv(path: Path, G: np.ndarray) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        for row in G:
            w.writerow([f"{complex(v).real!r}{complex(v).imag:+}j" for v in row])


def run(job: JobSpec) -> int:
    """Execute a job; returns the exit status."""
    try:
        report, gram = build_report(job)
    except ParseError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except KreinKernelsError as e:
        # invalid objects described by the input (non-coisometric data, bad domains, ...)
        print(f"input error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    if job.output:
        out = Path(job.output)
        out.write_text(text)
        if job.dump_gram and gram is not None:
            write_gram_csv(out.with_suffix(".gram.csv"), gram)
    else:
        sys.stdout.write(text)
        if job.dump_gram and gram is not None:
            write_gram_csv(Path("gram.csv"), gram)
    return 0 if report["summary"]["failed"] == 0 else 1


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="krein-kernels", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", help="JSON input file (defaults to the bundled example for the command)")
    p.add_argument("--seed", type=int, default=1, help="64-bit seed for the SplitMix64 generator")
    p.add_argument("--tol", type=float, default=None, help="override every check threshold")
    p.add_argument("--output", help="write the JSON report here instead of stdout")
    p.add_argument("--dump-gram", action="store_true", help="also write the kernel Gram matrix as CSV")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        job = JobSpec(args.command, args.input, args.seed, args.tol, args.output, args.dump_gram)
    except ParseError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    return run(job)


if __name__ == "__main__":
    sys.exit(main())
