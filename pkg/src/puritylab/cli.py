"""Command-line front end.

    purity-lab analyze --state "ghz(5) x ghz(4)" --rate
    purity-lab analyze --file data/mixed_example.json --np --format json
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings

from . import dsl
from .oracle import RANK_TOL, all_cut_spectra, factor_check
from .report import build_report, render_text, to_json
from .separability import ENTANGLEMENT_DETECTED, ENTANGLEMENT_PRESENT, INCONCLUSIVE
from .statefile import state_from_json
from .states import (
    DEFAULT_MAX_DIM,
    DimensionCapExceeded,
    PureState,
    SiteSubset,
    StateError,
    dim_cap,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CAP = 2
EXIT_ENTANGLED = 3
EXIT_INCONCLUSIVE = 4


def _input_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", metavar="EXPR", help="state expression, e.g. 'ghz(3) x bell'")
    src.add_argument("--file", metavar="PATH",
                     help="JSON state file, or a text file holding one state expression")
    p.add_argument("--tol", type=float, default=1e-9, help="purity tolerance (default 1e-9)")
    p.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM,
                   help=f"total Hilbert-space dimension cap (default {DEFAULT_MAX_DIM})")
    p.add_argument("--normalize", action="store_true",
                   help="renormalize non-normalized file input with a warning instead of failing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="purity-lab",
        description="Purity-number separability analysis of multi-qudit states.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{analyze}")

    a = sub.add_parser("analyze", help="analyze one state and print a report")
    _input_args(a)
    a.add_argument("--rate", action="store_true", help="entanglement rate (pure states only)")
    a.add_argument("--np", action="store_true", dest="np_",
                   help="run the mixed-state n_p algorithm (pure input is treated as a density matrix)")
    a.add_argument("--profile", action="store_true",
                   help="full purity-number table (on by default for pure input without --rate/--np)")
    a.add_argument("--format", choices=["json", "text"], default=None,
                   help="output format (default: text on a terminal, json otherwise)")
    a.add_argument("--no-timing", action="store_true", help="omit timing from the report")
    a.add_argument("--exit-by-verdict", action="store_true",
                   help="exit 0 separable/passed, 3 entanglement, 4 inconclusive")
    a.add_argument("--workers", type=int, default=1, help="threads for subset scans (default 1)")

    o = sub.add_parser("oracle")  # fixture generation; not advertised
    _input_args(o)
    o.add_argument("--rank-tol", type=float, default=RANK_TOL)
    return parser


def _load(args, timing: dict):
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.state is not None:
            state = dsl.state(args.state, strict=False)
        else:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
            try:
                obj = json.loads(text)
            except json.JSONDecodeError:
                state = dsl.state(text.strip(), strict=not args.normalize)
            else:
                state = state_from_json(obj, strict=not args.normalize)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    timing["load"] = round((time.perf_counter() - t0) * 1e3, 3)
    return state


def _exit_code(verdict: str) -> int:
    if verdict in (ENTANGLEMENT_PRESENT, ENTANGLEMENT_DETECTED):
        return EXIT_ENTANGLED
    if verdict == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _analyze(args) -> int:
    timing: dict = {}
    state = _load(args, timing)
    if args.rate and (args.np_ or not isinstance(state, PureState)):
        print("error: --rate is defined for pure states only", file=sys.stderr)
        return EXIT_INPUT
    rep = build_report(
        state, expression=args.state, file=args.file, tol=args.tol, max_dim=args.max_dim,
        force_mixed=args.np_, profile=args.profile or not (args.rate or args.np_),
        workers=max(1, args.workers), timing=not args.no_timing, extra_timing=timing)
    fmt = args.format or ("text" if sys.stdout.isatty() else "json")
    sys.stdout.write(to_json(rep) if fmt == "json" else render_text(rep))
    return _exit_code(rep["verdict"]) if args.exit_by_verdict else EXIT_OK


def _oracle(args) -> int:
    state = _load(args, {})
    n = state.n
    if isinstance(state, PureState):
        cuts = [
            {"cut": list(c.cut.members), "singular_values": list(c.singular_values),
             "schmidt_rank": c.schmidt_rank, "purity": c.purity}
            for c in all_cut_spectra(state, args.rank_tol)
        ]
    else:
        cuts = [
            {"cut": list(S.members), "factor_check": factor_check(state, S, args.tol)}
            for S in (SiteSubset.from_mask(m, n) for m in range(1, (1 << n) - 1))
        ]
    sys.stdout.write(json.dumps({"dims": list(state.dims), "cuts": cuts}, indent=2) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with dim_cap(args.max_dim):
            if args.command == "oracle":
                return _oracle(args)
            return _analyze(args)
    except dsl.ParseError as exc:
        print(f"error: {exc}\n{exc.caret()}", file=sys.stderr)
        return EXIT_INPUT
    except DimensionCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (StateError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
