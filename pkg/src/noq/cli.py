"""Command-line front end.

Subcommands::

    noq compute STATE.json --measure noq-a     # MeasureReport as JSON
    noq family werner d=2 beta=-1               # state JSON
    noq sweep SPEC.json                         # CSV, one row per grid point
    noq verify STATE.json                       # invariant checks

Exit codes: 0 success, 1 unreadable or malformed JSON, 2 invalid state or
parameters, 3 a verified invariant failed.  JSON goes to stdout and
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import channels as ch
from . import linalg as la
from . import measures as ms
from . import states as st
from .activation import block_formula, l1_formula, premeasurement_negativity
from .exceptions import NoqError
from .io import channel_from_json, dumps, state_from_json, state_to_json
from .optimizer import DEFAULT_CONFIG, OptimizerConfig

EXIT_OK, EXIT_JSON, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2, 3
FAMILIES = ("werner", "isotropic", "bell-diagonal", "channel", "random")


class _JsonInputError(Exception):
    pass


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") if path != "-" else sys.stdin as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _JsonInputError(f"{path}: {exc}") from exc


def _config(args) -> OptimizerConfig:
    cfg = DEFAULT_CONFIG
    changes = {}
    for flag, key in (("restarts", "restarts"), ("seed", "seed"), ("tol", "convergence_tol"),
                      ("grid", "qubit_grid_resolution"), ("max_evals", "max_evaluations"),
                      ("strategy", "strategy")):
        v = getattr(args, flag, None)
        if v is not None:
            changes[key] = v
    env = os.environ.get("NOQ_MAX_EVALS")
    if env:
        cap = int(env)
        changes["max_evaluations"] = min(changes.get("max_evaluations", cfg.max_evaluations), cap)
    return cfg.replace(**changes)


def _config_from_dict(base: OptimizerConfig, d: dict) -> OptimizerConfig:
    alias = {"tol": "convergence_tol", "grid": "qubit_grid_resolution", "max_evals": "max_evaluations"}
    return base.replace(**{alias.get(k, k): v for k, v in d.items()})


# --- families ---------------------------------------------------------------------------


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_params(items: Sequence[str]) -> dict:
    out = {}
    for it in items:
        if "=" not in it:
            raise ValueError(f"parameter {it!r} is not of the form key=value")
        k, v = it.split("=", 1)
        out[k.strip()] = _parse_value(v.strip())
    return out


def _pop(p: dict, *names, default=None, required=True):
    for n in names:
        if n in p:
            return p.pop(n)
    if required and default is None:
        raise ValueError(f"missing parameter {names[0]!r}")
    return default


def _make_channel(p: dict) -> ch.QubitChannel:
    kind = _pop(p, "kind", default="amplitude-damping")
    if kind == "amplitude-damping":
        return ch.amplitude_damping(float(_pop(p, "gamma")))
    if kind == "pauli":
        return ch.pauli_channel(*(float(_pop(p, f"p{k}")) for k in range(4)))
    if kind == "identity":
        return ch.identity_channel()
    if kind == "random":
        return ch.random_channel(int(_pop(p, "n_kraus", default=4)), int(_pop(p, "seed", default=0, required=False)))
    if kind == "kraus":
        return channel_from_json(_load_json(str(_pop(p, "file"))))
    raise ValueError(f"unknown channel kind {kind!r}")


def make_family(family: str, params: dict) -> st.DensityMatrix:
    """Build a state of a named family from ``key=value`` parameters."""
    p = dict(params)
    if family == "werner":
        rho = st.werner(int(_pop(p, "d")), float(_pop(p, "beta")))
    elif family == "isotropic":
        rho = st.isotropic(int(_pop(p, "d")), float(_pop(p, "lambda", "lam")))
    elif family == "bell-diagonal":
        if "r11" in p:
            rho = st.bell_diagonal_from_correlations(*(float(_pop(p, k)) for k in ("r11", "r22", "r33")))
        else:
            rho = st.bell_diagonal(*(float(_pop(p, f"p{k}")) for k in range(4)))
    elif family == "channel":
        rho = ch.channel_to_state(_make_channel(p))
    elif family == "random":
        d_a, d_b = int(_pop(p, "d_a")), int(_pop(p, "d_b"))
        seed = int(_pop(p, "seed", default=0, required=False))
        kind = _pop(p, "kind", default="general")
        if kind == "general":
            rank = p.pop("rank", None)
            rho = st.random_density(d_a, d_b, None if rank is None else int(rank), seed)
        elif kind == "cq":
            rho = st.random_cq(d_a, d_b, seed)[0]
        elif kind == "cc":
            rho = st.random_cc(d_a, d_b, seed)[0]
        elif kind == "mcs":
            rho = st.mcs_to_density(st.random_mcs(d_a, d_b, seed=seed))
        elif kind == "separable":
            rho = st.random_separable(d_a, d_b, seed=seed)
        else:
            raise ValueError(f"unknown random kind {kind!r}")
    else:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if p:
        raise ValueError(f"unused parameters for {family}: {', '.join(sorted(p))}")
    return rho


# --- sweeps --------------------------------------------------------------------------------


def _range(spec: dict) -> list:
    start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
    if step <= 0 or stop < start:
        raise ValueError(f"invalid range {spec}")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


def sweep_rows(spec: dict):
    """Yield the CSV header, then one row per grid point in grid order."""
    if not isinstance(spec, dict) or "family" not in spec or "measures" not in spec:
        raise ValueError("sweep spec needs 'family', 'params' and 'measures'")
    family = spec["family"]
    if family not in ("werner", "isotropic", "bell-diagonal", "channel"):
        raise ValueError(f"sweeps support werner, isotropic, bell-diagonal and channel, not {family!r}")
    measures = list(spec["measures"])
    for m in measures:
        if m not in ms.MEASURES:
            raise ValueError(f"unknown measure {m!r}")
    cfg = _config_from_dict(DEFAULT_CONFIG, spec.get("optimizer", {}))
    fixed, ranged = {}, {}
    for k, v in spec.get("params", {}).items():
        if isinstance(v, dict):
            ranged[k] = _range(v)
            if not ranged[k]:
                raise ValueError(f"empty range for {k}")
        else:
            fixed[k] = v
    names = list(ranged)
    yield names + measures
    for combo in itertools.product(*(ranged[k] for k in names)):
        rho = make_family(family, {**fixed, **dict(zip(names, combo))})
        yield list(combo) + [ms.compute(m, rho, cfg).value for m in measures]


# --- verification ----------------------------------------------------------------------------


def verify_state(rho: st.DensityMatrix, config: OptimizerConfig) -> list:
    """Run the invariant checks that apply to ``rho``; returns ``(name, ok, detail)``."""
    checks = []
    n = ms.negativity(rho)
    qa = ms.noq_one_sided(rho, "A", config)
    qab = ms.noq_two_sided(rho, config)
    checks.append(("negativity <= noq-a", n <= qa.value + 1e-6, {"negativity": n, "noq-a": qa.value}))
    checks.append(("noq-a <= noq-ab", qa.value <= qab.value + 1e-4, {"noq-a": qa.value, "noq-ab": qab.value}))
    kh = ms.khasin_bound_check(rho, config)
    checks.append(("khasin bound", kh.holds, {"negativity": kh.negativity, "bound": kh.bound}))
    ua, ub = qab.basis_a, qab.basis_b
    pre = premeasurement_negativity(rho, "AB", (ua, ub))
    checks.append(("pre-measurement negativity = l1 formula", abs(pre - l1_formula(rho, (ua, ub))) < 1e-10,
                   {"negativity": pre}))
    pre_a = premeasurement_negativity(rho, "A", (qa.basis_a,))
    checks.append(("one-sided pre-measurement negativity = block formula",
                   abs(pre_a - block_formula(rho, qa.basis_a)) < 1e-10, {"negativity": pre_a}))
    l1 = la.l1_norm(rho.matrix, (ua, ub))
    checks.append(("l1 >= trace norm", l1 >= 1 - 1e-9, {"l1": l1}))
    if rho.cut.dim_a == 2:
        td = ms.trace_distance_discord(rho, config)
        checks.append(("trace discord = noq-a", abs(td.value - qa.value) < 1e-5,
                       {"trace-discord": td.value, "noq-a": qa.value}))
    return [(name, bool(ok), detail) for name, ok, detail in checks]


# --- entry point -----------------------------------------------------------------------------


def _add_optimizer_flags(p: argparse.ArgumentParser):
    p.add_argument("--restarts", type=int, help=f"multi-start restarts (default {DEFAULT_CONFIG.restarts})")
    p.add_argument("--seed", type=int, help="optimizer seed (default 0)")
    p.add_argument("--tol", type=float, help=f"convergence tolerance (default {DEFAULT_CONFIG.convergence_tol})")
    p.add_argument("--grid", type=int, help=f"qubit grid resolution (default {DEFAULT_CONFIG.qubit_grid_resolution})")
    p.add_argument("--max-evals", dest="max_evals", type=int, help="evaluation cap per local search")
    p.add_argument("--strategy", choices=("both", "grid", "multistart"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noq", description="Negativity of quantumness and related measures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="evaluate a measure on a state file")
    p.add_argument("state_file")
    p.add_argument("--measure", default="noq-a", choices=ms.MEASURES)
    p.add_argument("--out", choices=("json", "csv"), default="json")
    _add_optimizer_flags(p)

    p = sub.add_parser("family", help="print a state of a named family")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("params", nargs="*", help="key=value parameters")

    p = sub.add_parser("sweep", help="evaluate measures over a parameter grid")
    p.add_argument("spec_file")
    p.add_argument("--out", choices=("csv", "json"), default="csv")

    p = sub.add_parser("verify", help="run invariant checks on a state file")
    p.add_argument("state_file")
    p.add_argument("--out", choices=("json", "csv"), default="json")
    _add_optimizer_flags(p)
    return parser


def _emit_csv(rows, out):
    w = csv.writer(out, lineterminator="\n")
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "compute":
            rho = state_from_json(_load_json(args.state_file))
            rep = ms.compute(args.measure, rho, _config(args)).to_dict()
            if args.out == "json":
                print(dumps(rep), file=out)
            else:
                keys = [k for k in rep if not k.startswith("basis")]
                _emit_csv([keys, [rep[k] if rep[k] is not None else "" for k in keys]], out)
        elif args.command == "family":
            print(dumps(state_to_json(make_family(args.family, parse_params(args.params)))), file=out)
        elif args.command == "sweep":
            rows = list(sweep_rows(_load_json(args.spec_file)))
            if args.out == "csv":
                _emit_csv(rows, out)
            else:
                print(dumps([dict(zip(rows[0], r)) for r in rows[1:]]), file=out)
        elif args.command == "verify":
            rho = state_from_json(_load_json(args.state_file))
            checks = verify_state(rho, _config(args))
            if args.out == "json":
                print(dumps([{"check": c, "passed": ok, "detail": d} for c, ok, d in checks]), file=out)
            else:
                _emit_csv([["check", "passed"]] + [[c, ok] for c, ok, _ in checks], out)
            failed = [c for c, ok, _ in checks if not ok]
            if failed:
                print(f"failed: {'; '.join(failed)}", file=sys.stderr)
                return EXIT_VERIFY
    except _JsonInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_JSON
    except (NoqError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
