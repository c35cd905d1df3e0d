"""Command line front end.

    bezout solve --input system.json --out results/
    bezout dump --input system.json --stage rank --out results/

Exit status: 0 success, 2 unreadable input or bad option, 3 the system is not
zero-dimensional, 4 ``B(1)`` could not be inverted after reduction.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .bezmat import OracleSizeError, build_family, dump_family, symbolic_family
from .poly import PolyParseError, PolySystem, from_terms, parse
from .reduce import NonZeroDimensional, numerical_rank, reduce_family
from .solve import ConditioningError, companions, joint_eigen, log_error_histogram, verify

__all__ = ["load_system", "fixture_path", "RunConfig", "cmd_solve", "cmd_dump", "main"]

STAGES = ("bezout", "rank", "reduce", "companions", "roots", "all")
EXIT_PARSE, EXIT_NONZERO_DIM, EXIT_CONDITIONING = 2, 3, 4

log = logging.getLogger("bezout")


class InputError(ValueError):
    pass


def fixture_path(name: str) -> Path:
    """Path of a bundled system file, e.g. ``fixture_path("example22")``."""
    return Path(str(resources.files("bezout") / "data" / f"{name}.json"))


def load_system(src) -> PolySystem:
    """Read a system file (JSON) or an already-decoded dict.

    ``polys`` entries are expression strings or term lists
    ``[{"e": [2, 1], "c": [3, 0]}, ...]``; ``variables`` and ``multidegree``
    are optional.
    """
    if isinstance(src, dict):
        data = src
    else:
        try:
            data = json.loads(Path(src).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read system file {src}: {exc}") from exc
    polys = data.get("polys")
    if not isinstance(polys, list) or not polys:
        raise InputError("system file needs a non-empty 'polys' list")
    n = int(data.get("nvars", len(polys)))
    names = data.get("variables") or [f"x{j + 1}" for j in range(n)]
    if len(names) != n:
        raise InputError(f"{len(names)} variable names for nvars = {n}")
    parsed = []
    for p in polys:
        if isinstance(p, str):
            parsed.append(parse(p, names))
        elif isinstance(p, list):
            parsed.append(from_terms(n, p))
        else:
            raise InputError(f"cannot interpret polynomial entry {p!r}")
    try:
        return PolySystem(tuple(parsed), data.get("multidegree"), tuple(names))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


@dataclass
class RunConfig:
    input: str
    out: Path
    stage: str = "all"
    tau: float = None
    seed: int = 0
    blocks: bool = False
    oracle: bool = False

    def __post_init__(self):
        if self.stage not in STAGES:
            raise InputError(f"unknown stage {self.stage!r}")
        if self.tau is not None and not 0.0 < self.tau < 1.0:
            raise InputError("tau must lie in (0, 1)")
        self.out = Path(self.out)


def _family(f: PolySystem, cfg: RunConfig, prune: bool = True):
    return symbolic_family(f, prune) if cfg.oracle else build_family(f, prune)


def _write(cfg: RunConfig, name: str, text: str):
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / name).write_text(text)


def _reduced_dump(rf) -> dict:
    d = dump_family(rf.family)
    d["dimA"] = rf.dimA
    d["relations"] = [str(r) for r in rf.relations]
    d["iterations"] = rf.iterations
    d["tau"] = rf.tau
    return d


def _complex_rows(M) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def cmd_solve(cfg: RunConfig) -> int:
    f = load_system(cfg.input)
    fam = _family(f, cfg)
    _write(cfg, "family.json", json.dumps(dump_family(fam)))
    rf = reduce_family(fam, tau=cfg.tau, use_blocks=cfg.blocks)
    _write(cfg, "rank.csv", rf.initial_rank.to_csv())
    cs = companions(rf)
    roots = verify(joint_eigen(cs, cfg.seed), f)
    _write(cfg, "roots.json", roots.to_json())
    _write(cfg, "histogram.csv", log_error_histogram(roots).to_csv())
    worst = float(roots.max_residuals().max(initial=0.0))
    print(f"dim A = {rf.dimA}")
    print(f"roots: {len(roots)}")
    print(f"max residual: {worst:.3e}")
    if cs.ill_conditioned:
        print(f"warning: cond(B(1)) = {cs.cond:.3e}", file=sys.stderr)
    return 0


def cmd_dump(cfg: RunConfig) -> int:
    f = load_system(cfg.input)
    if cfg.stage == "rank":
        # full D x D matrix: pruning zero lines does not change the rank
        rep = numerical_rank(_family(f, cfg, prune=False).B1, cfg.tau, cfg.blocks)
        _write(cfg, "rank.csv", rep.to_csv())
        _write(cfg, "rank.json", rep.to_json())
        print(f"rank B(1) = {rep.rank} of {rep.diag.size}")
        return 0
    fam = _family(f, cfg)
    if cfg.stage == "bezout":
        _write(cfg, "family.json", json.dumps(dump_family(fam)))
        print(f"family {fam.shape[0]}x{fam.shape[1]}")
        return 0
    rf = reduce_family(fam, tau=cfg.tau, use_blocks=cfg.blocks)
    if cfg.stage == "reduce":
        _write(cfg, "reduced.json", json.dumps(_reduced_dump(rf)))
        print(f"dim A = {rf.dimA}")
        return 0
    cs = companions(rf)
    if cfg.stage == "companions":
        _write(cfg, "companions.json", json.dumps({
            "dimA": cs.dimA, "cond": cs.cond,
            "basis": [str(p) for p in cs.basis_labels],
            "X": [_complex_rows(X) for X in cs.X]}))
        print(f"dim A = {cs.dimA}")
        return 0
    roots = verify(joint_eigen(cs, cfg.seed), f)
    _write(cfg, "roots.json", roots.to_json())
    _write(cfg, "histogram.csv", log_error_histogram(roots).to_csv())
    if cfg.stage == "all":
        _write(cfg, "family.json", json.dumps(dump_family(fam)))
        _write(cfg, "rank.csv", rf.initial_rank.to_csv())
        _write(cfg, "reduced.json", json.dumps(_reduced_dump(rf)))
    print(f"roots: {len(roots)}")
    return 0


def _onoff(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bezout", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=("solve", "dump"))
    p.add_argument("--input", required=True, help="system file (JSON)")
    p.add_argument("--stage", default="all", choices=STAGES)
    p.add_argument("--tau", type=float, default=None, help="relative rank threshold")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--blocks", type=_onoff, default=False, metavar="on|off")
    p.add_argument("--oracle", type=_onoff, default=False, metavar="on|off")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        cfg = RunConfig(args.input, Path(args.out), args.stage, args.tau, args.seed,
                        args.blocks, args.oracle)
        run = cmd_solve if args.command == "solve" else cmd_dump
        return run(cfg)
    except (InputError, PolyParseError, OracleSizeError) as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonZeroDimensional as exc:
        print(f"error: nonzero-dimensional: {exc}", file=sys.stderr)
        return EXIT_NONZERO_DIM
    except (ConditioningError, np.linalg.LinAlgError) as exc:
        print(f"error: conditioning: {exc}", file=sys.stderr)
        return EXIT_CONDITIONING


if __name__ == "__main__":
    sys.exit(main())
