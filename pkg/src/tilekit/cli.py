"""Command-line front end: ``tilekit build|analyze|slide|distance|build-nd``.

Exit status is 0 when every requested check passes, 1 when a check fails and
2 for usage errors.  Reports go to stdout as JSON.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import random
import sys
from pathlib import Path

from .autos import auto_power, derived_auto, discrete_log, intertwiner_check, synthesize_circuit
from .builder import (
    FORMATS,
    CssCode,
    KoszulSpec,
    build_box_code,
    build_tile_code,
    export,
    report,
    translate_code,
)
from .distance import BudgetExceeded, exact_distance, stochastic_upper
from .linalg import char_poly, factor, is_identity, matrix_order
from .logicals import build_basis, extract_rules, stabilizer_in_strip
from .poly import LaurentPoly, PolySyntaxError, TilePair, format_poly
from .protocol import Slider, code_state_group, prepare_logical_state, transformed_signs
from .quotient import QuotientNotFinite, check_algebraic_to, check_combinatorial_to, power_relation, quotient_ring

log = logging.getLogger("tilekit")

PRESETS = {
    "running2d": {"f": "1+x^2*y+x^2*y^2", "g": "x+x^2+y^2", "D": 2, "L": 12, "M": 12},
    "box4d": {
        "polys": "1+x*y+w*y*z+w*x*z+x;x*z+w+w*x*y+w*x*y*z+z;y*z+x+w*z+w*y+w*x*y;z+y+x*y*z+w*x+w*x*z",
        "shape": "3,3,3,3",
        "signs": "1,-1,-1,1",
        "D": 1,
    },
}

SUFFIX = {"alist": ".alist", "triplets": ".txt", "json": ".json"}


class UsageError(Exception):
    pass


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def default_signs(nvars: int) -> tuple[int, ...]:
    # alternating pairs keep the + and - axes balanced in even dimension
    return tuple(1 if i % 4 in (0, 3) else -1 for i in range(nvars))


def _apply_preset(args) -> None:
    name = getattr(args, "preset", None)
    if not name:
        return
    for key, val in PRESETS[name].items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)


def tiles_from_args(args) -> TilePair:
    if args.f is None or args.g is None:
        raise UsageError("both --f and --g are required (or use --preset)")
    return TilePair.parse(args.f, args.g, args.D)


def code_from_args(args) -> CssCode:
    """2D tile code from --f/--g/-L/-M, or a box code from --polys/--shape."""
    _apply_preset(args)
    if getattr(args, "polys", None):
        if not args.shape:
            raise UsageError("--polys needs --shape")
        shape = _ints(args.shape)
        signs = _ints(args.signs) if getattr(args, "signs", None) else default_signs(len(shape))
        spec = KoszulSpec.parse(args.polys.split(";"), shape, signs, args.D)
        return build_box_code(spec)
    tiles = tiles_from_args(args)
    if args.L is None or args.M is None:
        raise UsageError("-L and -M are required (or use --preset)")
    return build_tile_code(tiles, args.L, args.M)


def _emit(doc: dict, out: str | None, name: str) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2)
    print(text)
    if out:
        Path(f"{out}.{name}.json").write_text(text + "\n")


def _write_code(code: CssCode, fmt: str, out: str | None) -> None:
    if out:
        Path(out + SUFFIX[fmt]).write_bytes(export(code, fmt))


# commands --------------------------------------------------------------------------


def cmd_build(args) -> int:
    code = code_from_args(args)
    tiles = code.meta["tile_pair"]
    to = check_algebraic_to(tiles.f, tiles.g, tiles.D)
    doc = report(code, algebraic_to=to.as_dict())
    if args.window:
        doc["combinatorial_to"] = check_combinatorial_to(tiles, args.window)
    _write_code(code, args.format, args.out)
    _emit(doc, args.out, "report")
    ok = code.commutes()
    if args.require_to:
        ok &= to.passed and all(doc.get("combinatorial_to", {}).values())
    return 0 if ok else 1


def cmd_build_nd(args) -> int:
    code = code_from_args(args)
    doc = report(code, signs=list(code.meta.get("signs", [])), commutes=code.commutes())
    _write_code(code, args.format, args.out)
    _emit(doc, args.out, "report")
    return 0 if code.commutes() else 1


def cmd_analyze(args) -> int:
    code = code_from_args(args)
    tiles = code.meta["tile_pair"]
    to = check_algebraic_to(tiles.f, tiles.g, tiles.D)
    doc = report(code, algebraic_to=to.as_dict())
    checks = {"commutes": code.commutes(), "algebraic_to": to.passed}
    if args.window:
        comb = check_combinatorial_to(tiles, args.window)
        doc["combinatorial_to"] = comb
        checks["combinatorial_to"] = all(comb.values())
    q = quotient_ring(tiles.f, tiles.g, tiles.D)
    cx, cy = char_poly(q.Mx), char_poly(q.My)
    doc["quotient"] = {
        "dim": q.dim,
        "window": q.window,
        "basis": [list(m) for m in q.basis],
        "charpoly_x": str(cx),
        "charpoly_y": str(cy),
        "charpoly_x_factors": [str(p) for p in factor(cx)],
        "charpoly_y_factors": [str(p) for p in factor(cy)],
        "order_Mx": matrix_order(q.Mx),
        "order_My": matrix_order(q.My),
        "y_as_power_of_x": power_relation(q, q.reduce(LaurentPoly.monomial((0, 1))), axis=0),
    }
    checks["k_equals_dim"] = doc["k"] == q.dim
    basis = build_basis(code)
    checks["pairing_identity"] = is_identity(basis.pairing())
    checks["basis_unique"] = build_basis(code) == basis
    tx = derived_auto(code, basis, "x")
    ty = derived_auto(code, basis, "y")
    ix = intertwiner_check(code, basis, q, tx)
    iy = intertwiner_check(code, basis, q, ty)
    gates = synthesize_circuit(tx)
    doc["autos"] = {
        "order_Tx": tx.order(),
        "order_Ty": ty.order(),
        "Ty_as_power_of_Tx": discrete_log(tx, ty),
        "commute": (tx @ ty) == (ty @ tx),
        "symplectic": tx.symplectic() and ty.symplectic(),
        "intertwiner_x": ix,
        "intertwiner_y": iy,
        "Tx_A": _rows(tx.A),
        "Tx_B": _rows(tx.B),
        "Tx_circuit_gates": len(gates),
    }
    checks["symplectic"] = doc["autos"]["symplectic"]
    checks["intertwiner"] = bool(ix["passed"] and iy["passed"])
    doc["basis"] = {
        "x": [basis.x(i).support for i in range(basis.k)],
        "z": [basis.z(i).support for i in range(basis.k)],
        "x_weights": [basis.x(i).weight for i in range(basis.k)],
        "z_weights": [basis.z(i).weight for i in range(basis.k)],
    }
    doc["ca_rules"] = {kind: json.loads(extract_rules(tiles, kind).to_json()) for kind in ("X", "Z")}
    strip = stabilizer_in_strip(code)
    doc["strip_violations"] = strip
    checks["strip_test"] = not strip
    doc["tiles"] = [format_poly(tiles.f), format_poly(tiles.g)]
    doc["checks"] = checks
    if args.out:
        Path(args.out + ".circuit.txt").write_text("".join(f"{k} {a} {b}\n" for k, a, b in gates))
    _emit(doc, args.out, "analysis")
    return 0 if all(checks.values()) else 1


def _rows(m) -> list[str]:
    return ["".join(str(int(b)) for b in m.row(i)) for i in range(m.rows)]


def cmd_slide(args) -> int:
    code = code_from_args(args)
    if args.epsilon not in (1, -1):
        raise UsageError("--epsilon must be 1 or -1")
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    basis = build_basis(code)
    slider = Slider(code, basis, args.epsilon)
    rng = random.Random(args.seed)
    start = [rng.choice((1, -1)) for _ in range(basis.k)]
    signs = list(start)
    state = prepare_logical_state(code, basis, signs)
    origin = (0, 0)
    per_step = []
    traces = []
    for step in range(args.steps):
        new_origin, trace = slider.run(state, origin, rng, args.seed)
        ok = slider.check(state, origin, new_origin, signs, trace)
        slider.reset_frame(state, new_origin)
        signs = transformed_signs(slider.auto, signs)
        ok &= slider.logical_signs(state, new_origin) == signs
        per_step.append(ok)
        traces.append(trace.to_json())
        origin = new_origin
    total = auto_power(slider.auto, args.steps)
    final_code = translate_code(slider.code0, *origin)
    returned = state.canonical() == code_state_group(state, final_code, basis, start)
    blob = ("\n".join(traces) + "\n").encode() if traces else b""
    if args.trace_out:
        Path(args.trace_out).write_bytes(blob)
    doc = {
        "steps": args.steps,
        "epsilon": args.epsilon,
        "seed": args.seed,
        "order_T": slider.auto.order(),
        "all_steps_match": all(per_step),
        "failed_steps": [i for i, ok in enumerate(per_step) if not ok],
        "logical_action_identity": is_identity(total.A) and is_identity(total.B),
        "returned_to_initial_signs": returned,
        "initial_signs": start,
        "final_signs": signs,
        "trace_sha256": hashlib.sha256(blob).hexdigest(),
    }
    _emit(doc, args.out, "slide")
    return 0 if all(per_step) else 1


def cmd_distance(args) -> int:
    code = code_from_args(args)
    doc = {"n": code.n}
    if args.exact:
        try:
            doc["exact"] = exact_distance(code).as_dict()
        except BudgetExceeded as exc:
            raise UsageError(str(exc)) from None
    if args.trials:
        rep = stochastic_upper(code, int(args.trials), args.seed, target=args.target)
        doc["stochastic"] = rep.as_dict()
    _emit(doc, args.out, "distance")
    return 0


# parser ----------------------------------------------------------------------------


def _code_opts(p: argparse.ArgumentParser, nd: bool = False) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("-D", type=int, default=None, help="tile box size (inferred if omitted)")
    if not nd:
        p.add_argument("--f", help="X-tile polynomial on vertical qubits")
        p.add_argument("--g", help="X-tile polynomial on horizontal qubits")
        p.add_argument("-L", type=int)
        p.add_argument("-M", type=int)
    p.add_argument("--polys", help="';'-separated generators for a box code")
    p.add_argument("--shape", help="comma-separated box shape")
    p.add_argument("--signs", help="comma-separated +1/-1 per axis")
    p.add_argument("--out", help="output path prefix")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tilekit", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a 2D tile code and export its check matrices")
    _code_opts(p)
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--window", type=int, help="also run the quadrant window test at this size")
    p.add_argument("--require-to", action="store_true", help="fail unless the tiles pass the TO tests")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("analyze", help="quotient ring, logical basis and derived automorphisms")
    _code_opts(p)
    p.add_argument("--window", type=int)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("slide", help="simulate the sliding protocol")
    _code_opts(p)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=int, default=1)
    p.add_argument("--trace-out", help="write one JSON trace per line")
    p.set_defaults(func=cmd_slide)

    p = sub.add_parser("distance", help="exact or stochastic distance")
    _code_opts(p)
    p.add_argument("--trials", type=float, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", type=int, help="stop once a logical this light is found")
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("build-nd", help="build a box code from 2j polynomials")
    _code_opts(p, nd=True)
    p.add_argument("--format", choices=FORMATS, default="json")
    p.set_defaults(func=cmd_build_nd)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, PolySyntaxError, QuotientNotFinite, ValueError) as exc:
        print(f"tilekit {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
