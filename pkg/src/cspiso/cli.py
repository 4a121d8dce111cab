"""Command-line entry point.

Exit codes: 0 success / positive result, 1 negative result (not isomorphic,
witness found), 2 usage or input error, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass

from .algebra import format_scalar
from .holant import HolantCapExceeded, signature_matrix
from .instances import InstanceError
from .interpolation import (
    CatalogCapExceeded,
    DistinguishInconclusive,
    distinguish,
)
from .intertwiners import (
    PermutationGroup,
    gadget_span,
    intertwiner_basis,
    is_intertwiner,
)
from .io import (
    FormatError,
    cfset_from_obj,
    dump_json,
    gadget_from_obj,
    instance_from_obj,
    instance_to_obj,
    load_json,
    parse_pin,
)
from .partition import TermCapExceeded, partition_function, pinned_partition
from .structure import automorphisms, find_isomorphisms, twin_classes
from . import expressions, selftest as selftest_mod


@dataclass
class RunConfig:
    term_cap: int = 10_000_000
    max_probes: int = 4000
    span_bound: int = 6
    output_format: str = "text"
    seed: int = 0


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return default if raw is None else int(raw)


def _emit(config: RunConfig, payload: dict, text_lines) -> None:
    if config.output_format == "json":
        print(dump_json(payload))
    else:
        for line in text_lines:
            print(line)


def _perm_str(sigma) -> str:
    return "(" + " ".join(str(x + 1) for x in sigma) + ")"


def _cmd_zeval(args, config: RunConfig) -> int:
    fset = cfset_from_obj(load_json(args.functions))
    inst = instance_from_obj(load_json(args.instance), fset)
    if args.pin is not None:
        psi = parse_pin(args.pin, inst.k, fset.q)
        value = pinned_partition(fset, inst, psi, cap=config.term_cap)
    else:
        value = partition_function(fset, inst, cap=config.term_cap)
    _emit(config, {"value": format_scalar(value)}, [format_scalar(value)])
    return 0


def _cmd_iso(args, config: RunConfig) -> int:
    fset = cfset_from_obj(load_json(args.f))
    gset = cfset_from_obj(load_json(args.g))
    isos = find_isomorphisms(fset, gset)
    payload = {"isomorphisms": [_perm_str(s) for s in isos]}
    if isos:
        _emit(config, payload, [_perm_str(s) for s in isos])
        return 0
    _emit(config, payload, ["none"])
    return 1


def _cmd_twins(args, config: RunConfig) -> int:
    fset = cfset_from_obj(load_json(args.f))
    classes = twin_classes(fset)
    rendered = [[i + 1 for i in cls] for cls in classes]
    _emit(
        config,
        {"classes": rendered},
        [" ".join("{" + ",".join(map(str, cls)) + "}" for cls in rendered)],
    )
    return 0


def _cmd_distinguish(args, config: RunConfig) -> int:
    fset = cfset_from_obj(load_json(args.f))
    gset = cfset_from_obj(load_json(args.g))
    phi = parse_pin(args.pin_f or "", 0 if args.pin_f is None else _pin_len(args.pin_f), fset.q) \
        if args.pin_f else ()
    psi = parse_pin(args.pin_g or "", 0 if args.pin_g is None else _pin_len(args.pin_g), gset.q) \
        if args.pin_g else ()
    result = distinguish(fset, gset, phi, psi, max_probes=args.max_catalog or config.max_probes)
    if result.sigma is not None:
        note = " (pins matched up to twins)" if result.twins_adjusted else ""
        _emit(
            config,
            {"isomorphic": True, "sigma": _perm_str(result.sigma),
             "twins_adjusted": result.twins_adjusted},
            [f"isomorphic via sigma={_perm_str(result.sigma)}{note}"],
        )
        return 0
    payload = {
        "isomorphic": False,
        "witness": instance_to_obj(result.witness),
        "z_f": format_scalar(result.z_f),
        "z_g": format_scalar(result.z_g),
    }
    _emit(
        config,
        payload,
        [
            "not isomorphic; witness instance:",
            dump_json(instance_to_obj(result.witness)),
            f"Z_f = {format_scalar(result.z_f)}",
            f"Z_g = {format_scalar(result.z_g)}",
        ],
    )
    return 1


def _pin_len(text: str) -> int:
    return 0 if not text.strip() else len(text.split(","))


def _cmd_sigmat(args, config: RunConfig) -> int:
    fset = cfset_from_obj(load_json(args.functions)) if args.functions else None
    gadget = gadget_from_obj(load_json(args.gadget), fset)
    matrix = signature_matrix(gadget, cap=config.term_cap)
    rendered = [[format_scalar(x) for x in row] for row in matrix.data]
    _emit(config, {"rows": matrix.rows, "cols": matrix.cols, "matrix": rendered},
          [" ".join(row) for row in rendered])
    return 0


def _cmd_decompose(args, config: RunConfig) -> int:
    fset = cfset_from_obj(load_json(args.functions))
    gadget = gadget_from_obj(load_json(args.gadget), fset)
    expr = expressions.decompose(gadget, fset)
    wanted = signature_matrix(gadget, cap=config.term_cap)
    got = expressions.evaluate_expression(expr, fset.q, fset.functions)
    match = wanted == got
    _emit(
        config,
        {"expression": repr(expr), "matches": match},
        [repr(expr), f"signature matrix match: {'yes' if match else 'NO'}"],
    )
    return 0 if match else 1


def _cmd_intertwiners(args, config: RunConfig) -> int:
    fset = cfset_from_obj(load_json(args.f))
    group = PermutationGroup.from_elements(fset.q, automorphisms(fset))
    space = intertwiner_basis(group, args.k, args.l)
    span = gadget_span(fset, args.k, args.l, args.span_bound or config.span_bound,
                       aut_group=group)
    members = all(
        is_intertwiner(m, group, args.k, args.l) for m in span.basis
    )
    lines = [
        f"orbit basis dimension: {space.dimension}",
        f"span dimension by size: {span.dimension_by_size}",
        f"span saturated by: {span.saturated_by}",
        f"span inside intertwiner space: {'yes' if members else 'NO'}",
        f"span equals orbit space: {'yes' if span.certified_equal else 'not certified'}",
    ]
    _emit(
        config,
        {
            "orbit_dimension": space.dimension,
            "span_dimensions": span.dimension_by_size,
            "saturated_by": span.saturated_by,
            "span_contained": members,
            "certified_equal": span.certified_equal,
        },
        lines,
    )
    return 0


def _cmd_selftest(args, config: RunConfig) -> int:
    rng = random.Random(config.seed)
    report = selftest_mod.run(rng)
    lines = [f"{'PASS' if ok else 'FAIL'}  {name}" for name, ok in report]
    ok_all = all(ok for _, ok in report)
    lines.append(f"{sum(ok for _, ok in report)}/{len(report)} suites passed")
    _emit(config, {"results": dict(report), "ok": ok_all}, lines)
    return 0 if ok_all else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cspiso",
        description="Exact #CSP partition functions, isomorphism witnesses, "
        "and Holant gadget calculus.",
    )
    parser.add_argument("--format", choices=["text", "json"], default="text")
    parser.add_argument("--term-cap", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeval", help="evaluate a partition function")
    p.add_argument("--functions", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--pin", default=None)

    p = sub.add_parser("iso", help="brute-force isomorphism search")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)

    p = sub.add_parser("twins", help="twin classes of a function set")
    p.add_argument("--f", required=True)

    p = sub.add_parser("distinguish", help="isomorphism or witness instance")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--pin-f", default=None)
    p.add_argument("--pin-g", default=None)
    p.add_argument("--max-catalog", type=int, default=None)

    p = sub.add_parser("sigmat", help="signature matrix of a gadget")
    p.add_argument("--gadget", required=True)
    p.add_argument("--functions", default=None)

    p = sub.add_parser("decompose", help="generator decomposition of a gadget")
    p.add_argument("--gadget", required=True)
    p.add_argument("--functions", required=True)

    p = sub.add_parser("intertwiners", help="orbit basis vs gadget span")
    p.add_argument("--f", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--span-bound", type=int, default=None)

    sub.add_parser("selftest", help="run the invariant suites")
    return parser


_COMMANDS = {
    "zeval": _cmd_zeval,
    "iso": _cmd_iso,
    "twins": _cmd_twins,
    "distinguish": _cmd_distinguish,
    "sigmat": _cmd_sigmat,
    "decompose": _cmd_decompose,
    "intertwiners": _cmd_intertwiners,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    config = RunConfig(
        term_cap=args.term_cap or _env_int("CSPISO_TERM_CAP", 10_000_000),
        max_probes=_env_int("CSPISO_MAX_PROBES", 4000),
        span_bound=_env_int("CSPISO_SPAN_BOUND", 6),
        output_format=args.format,
        seed=args.seed,
    )
    try:
        return _COMMANDS[args.command](args, config)
    except json.JSONDecodeError as exc:
        print(f"error: bad JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
              file=sys.stderr)
        return 2
    except (FormatError, InstanceError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TermCapExceeded, HolantCapExceeded, CatalogCapExceeded,
            DistinguishInconclusive) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
