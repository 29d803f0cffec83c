"""Command-line front end.

Exit codes: 0 on success, 1 when ``selftest`` finds a failing suite,
2 on usage or input validation errors.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from . import __version__, ensemble, experiments, measures, states, validation
from .errors import SteerCohError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.15g}"


def _csv(rows: list[dict], seed: int) -> str:
    out = io.StringIO()
    out.write(f"# steercoh {__version__} seed={seed}\n")
    cols = list(rows[0]) if rows else []
    out.write(",".join(cols) + "\n")
    for r in rows:
        out.write(",".join(_num(r[c]) for c in cols) + "\n")
    return out.getvalue()


def _json(payload: dict, seed: int) -> str:
    doc = {"version": __version__, "seed": seed, **payload}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(rows: list[dict], fmt: str, seed: int, key: str) -> str:
    if fmt == "csv":
        return _csv(rows, seed)
    payload = {key: rows[0]} if key != "rows" else {"rows": rows}
    return _json(payload, seed)


def cmd_measures(args) -> int:
    psi = states.load_state(args.state)
    report = measures.measure_report(psi).to_dict()
    if args.format == "csv":
        row = {"dA": psi.dims.dA, "dB": psi.dims.dB, "dE": psi.dims.dE, **report}
        sys.stdout.write(_csv([row], args.seed))
    else:
        report["dims"] = list(psi.dims.as_tuple())
        sys.stdout.write(_json({"measures": report}, args.seed))
    return EXIT_OK


def cmd_ensemble(args) -> int:
    alice = None if args.reading == "bipartite" else 2
    if alice is not None and args.a != 1:
        raise SteerCohError("--reading tripartite applies to --a 1 only")
    rep = ensemble.compare(args.a, args.K, args.samples, args.seed, alice_dim=alice,
                           workers=args.workers)
    row = rep.to_dict()
    sys.stdout.write(_emit([row], args.format, args.seed, "ensemble"))
    return EXIT_OK


def cmd_mzi(args) -> int:
    grid = validation.gamma_grid(args.gamma_start, args.gamma_end, args.gamma_step)
    rows = [
        {"gamma": g, "c1": c1, "c2": c2}
        for g, c1, c2 in measures.mzi_sweep(grid, args.phi, args.marker, args.env_overlap)
    ]
    sys.stdout.write(_emit(rows, args.format, args.seed, "rows"))
    return EXIT_OK


def cmd_selftest(args) -> int:
    print(f"steercoh {__version__} selftest scale={args.scale} seed={args.seed}")
    results = validation.run_all(args.seed, args.scale, echo=lambda s: print(s, flush=True),
                                 budget=args.budget)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_c3_probe(args) -> int:
    res = experiments.c3_function_probe(args.K, args.samples, args.seed)
    sys.stdout.write(_emit([res], args.format, args.seed, "c3_probe"))
    return EXIT_OK


def cmd_make_state(args) -> int:
    kind = args.kind
    if kind == "bell":
        psi = states.from_amplitudes((2, 2, 1), np.array([1, 0, 0, 1]) / np.sqrt(2))
    elif kind == "ghz":
        amps = np.zeros(8)
        amps[0] = amps[7] = 1 / np.sqrt(2)
        psi = states.from_amplitudes((2, 2, 2), amps)
    elif kind == "mzi":
        psi = states.mzi_state(args.gamma, args.phi)
    elif kind == "mzi-steering":
        psi = states.mzi_steering_state(args.gamma, args.phi, args.env_overlap)
    else:
        psi = states.haar_sample((args.dA, 2, args.dE), args.seed)
    text = json.dumps(states.state_to_json(psi)) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steercoh", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"steercoh {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt="json"):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("json", "csv"), default=fmt)

    sp = sub.add_parser("measures", help="all coherence measures of a state file")
    sp.add_argument("state", help='JSON file {"dims": [dA, 2, dE], "amplitudes": [[re, im], ...]}')
    common(sp)
    sp.set_defaults(func=cmd_measures)

    sp = sub.add_parser("ensemble", help="Monte Carlo vs closed-form Haar average of C_a")
    sp.add_argument("--a", type=int, required=True, choices=(1, 2, 3))
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--samples", type=int, default=100000)
    sp.add_argument("--reading", choices=("bipartite", "tripartite"), default="bipartite",
                    help="for a=1: sample dims (1,2,K), or (2,2,K) with a spectator qubit A")
    sp.add_argument("--workers", type=int, default=1)
    common(sp, "csv")
    sp.set_defaults(func=cmd_ensemble)

    sp = sub.add_parser("mzi", help="quantum-eraser sweep over the marker overlap")
    sp.add_argument("--gamma-start", type=float, default=0.0)
    sp.add_argument("--gamma-end", type=float, default=1.0)
    sp.add_argument("--gamma-step", type=float, default=0.05)
    sp.add_argument("--phi", type=float, default=0.0)
    sp.add_argument("--marker", choices=("steering", "environment"), default="steering",
                    help="where the which-path marker lives")
    sp.add_argument("--env-overlap", type=float, default=1.0,
                    help="overlap of an extra marker copy leaked into E (1 = none)")
    common(sp, "csv")
    sp.set_defaults(func=cmd_mzi)

    sp = sub.add_parser("selftest", help="run the validation suites")
    sp.add_argument("--scale", choices=("quick", "full"), default="quick")
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--budget", type=int, help="steering search budget (default: per scale)")
    sp.set_defaults(func=cmd_selftest)

    sp = sub.add_parser("c3-probe", help="is C3 a function of the conditional states of E?")
    sp.add_argument("--K", type=int, default=3)
    sp.add_argument("--samples", type=int, default=1000)
    common(sp)
    sp.set_defaults(func=cmd_c3_probe)

    sp = sub.add_parser("make-state", help="write a state file")
    sp.add_argument("kind", choices=("bell", "ghz", "mzi", "mzi-steering", "haar"))
    sp.add_argument("--gamma", type=float, default=0.5)
    sp.add_argument("--phi", type=float, default=0.0)
    sp.add_argument("--env-overlap", type=float, default=1.0)
    sp.add_argument("--dA", type=int, default=2)
    sp.add_argument("--dE", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_make_state)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SteerCohError, ValueError, OSError) as exc:
        print(f"steercoh {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
