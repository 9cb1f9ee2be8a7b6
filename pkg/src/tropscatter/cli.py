"""``trop-scatter`` command line front end.

Exit codes: 0 success, 1 a check or validation failed, 2 malformed input or
an I/O problem.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import jsonio
from .counts import (
    InconsistentDiagramError, NonGenericError, assemble_cylinder_count, build_f_an, canonical_line,
    check_birational_invariance, integrality_warnings, theta_product, trace_broken_lines, verify_exponential_formula,
)
from .geometry import Seed, star_subdivide
from .jsonio import FormatError
from .render import render_svg
from .scattering import (
    MonodromyError, ScatteringDiagram, ScatteringError, complete_to_consistency, extract_coefficients,
)
from .series import SeriesError
from .tropical import TypeError_, subdivide_spine, validate_type

log = logging.getLogger("tropscatter")

OK, FAILED, BAD_INPUT = 0, 1, 2
COMMANDS = ("scatter", "theta", "verify-exp", "validate", "cylinder", "subdivide")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    seed: Path | None = None
    diagram: Path | None = None
    table: Path | None = None
    type: Path | None = None
    spine: Path | None = None
    types: Path | None = None
    kind: str | None = None
    p: tuple[int, int] | None = None
    q: tuple[int, int] | None = None
    ray: tuple[int, int] | None = None
    order: int | None = None
    out: Path | None = None
    svg: Path | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.order is not None and self.order < 1:
            raise InputError("--order must be at least 1")


def thread_cap() -> int:
    """Value of ``TROP_SCATTER_THREADS``; all computations currently run on one thread."""
    raw = os.environ.get("TROP_SCATTER_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"TROP_SCATTER_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError("TROP_SCATTER_THREADS must be a positive integer")
    return n


def _vector(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers like 1,0, got {text!r}") from None
    return a, b


def _read(path: Path | None, flag: str):
    if path is None:
        raise InputError(f"{flag} is required")
    try:
        return jsonio.load_file(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _emit(cfg: RunConfig, payload) -> None:
    text = jsonio.dumps(payload)
    if cfg.out is None:
        sys.stdout.write(text)
        return
    try:
        cfg.out.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {cfg.out}: {exc.strerror}") from None


def _write_svg(cfg: RunConfig, **kwargs) -> None:
    if cfg.svg is None:
        return
    try:
        cfg.svg.write_text(render_svg(**kwargs), encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {cfg.svg}: {exc.strerror}") from None


def _load_diagram(cfg: RunConfig) -> ScatteringDiagram:
    d = jsonio.diagram_from_json(_read(cfg.diagram, "--diagram"))
    return d.with_order(cfg.order) if cfg.order is not None else d


# -- commands -----------------------------------------------------------------

def _scatter(cfg: RunConfig) -> int:
    if cfg.seed is not None:
        seed = jsonio.seed_from_json(_read(cfg.seed, "--seed"))
        initial = ScatteringDiagram(seed, (), cfg.order or seed.order)
    else:
        initial = _load_diagram(cfg)
    result = complete_to_consistency(initial)
    log.info("completed to order %d with %d walls", result.order, len(result.walls))
    _emit(cfg, jsonio.diagram_to_json(result))
    _write_svg(cfg, diagram=result, title="scattering diagram")
    return OK


def _theta(cfg: RunConfig) -> int:
    if cfg.p is None or cfg.q is None:
        raise InputError("theta needs -p and -q")
    d = _load_diagram(cfg)
    constants = theta_product(d, cfg.p, cfg.q, d.order)
    _emit(cfg, {"p": list(cfg.p), "q": list(cfg.q), "order": d.order,
                "constants": [{"r": list(r), "coefficient": jsonio.series_to_json(c)} for r, c in constants.items()]})
    if cfg.svg is not None:
        from .counts import generic_basepoints
        bp = generic_basepoints(d, 1)[0]
        lines = trace_broken_lines(d, cfg.p, bp, d.order) + trace_broken_lines(d, cfg.q, bp, d.order)
        _write_svg(cfg, diagram=d, broken_lines=lines, title=f"broken lines for {cfg.p} and {cfg.q}")
    return OK


def _verify_exp(cfg: RunConfig) -> int:
    table, line = jsonio.table_from_json(_read(cfg.table, "--table"))
    order = cfg.order or 4
    lines = [line] if line is not None else sorted({canonical_line(d) for d in table.directions()})
    for ln in lines:
        ok, diff = verify_exponential_formula(table, ln, order)
        for w in integrality_warnings(build_f_an(table, ln, order)):
            log.warning("line %s: %s", ln, w)
        if not ok:
            curve, m, an, lg = diff
            print(f"MISMATCH line={list(ln)} curve={list(curve)} dir={list(m)} an={an} log={lg}")
            return FAILED
    print("OK")
    return OK


def _validate(cfg: RunConfig) -> int:
    if cfg.kind is None:
        raise InputError("--kind is required")
    t = jsonio.type_from_json(_read(cfg.type, "--type"))
    verdict = validate_type(t.base, cfg.kind)
    print(jsonio.dumps({"valid": verdict.ok, "reason": verdict.reason, "kind": cfg.kind}), end="")
    return OK if verdict.ok else FAILED


def _cylinder(cfg: RunConfig) -> int:
    spine = jsonio.spine_from_json(_read(cfg.spine, "--spine"))
    items, split = jsonio.weighted_types_from_json(_read(cfg.types, "--types"))
    total = assemble_cylinder_count(spine, items, split)
    _emit(cfg, {"count": jsonio.frac_to_json(total), "types": len(items)})
    _write_svg(cfg, spine=spine, title="cylinder spine")
    return OK


def _subdivide(cfg: RunConfig) -> int:
    if cfg.ray is None:
        raise InputError("subdivide needs --ray")
    if cfg.spine is not None:
        s = jsonio.spine_from_json(_read(cfg.spine, "--spine"))
        fine = star_subdivide(s.fan, cfg.ray)
        out = subdivide_spine(s, s.fan, fine)
        _emit(cfg, jsonio.spine_to_json(out))
        _write_svg(cfg, spine=out, title="subdivided spine")
        return OK
    d = _load_diagram(cfg)
    coarse = d.fan
    fine = star_subdivide(coarse, cfg.ray)
    seed = Seed(fine.rays, tuple(fine.kinks), d.seed.curve_rank, d.order)
    initial = ScatteringDiagram(seed, tuple(w for w in d.walls if w.line), d.order)
    refined = complete_to_consistency(initial)
    old = complete_to_consistency(ScatteringDiagram(d.seed, tuple(w for w in d.walls if w.line), d.order))
    same = check_birational_invariance(extract_coefficients(old), extract_coefficients(refined), (fine, coarse), d.order)
    _emit(cfg, jsonio.diagram_to_json(refined))
    _write_svg(cfg, diagram=refined, title="refined diagram")
    if not same:
        print("birational invariance FAILED", file=sys.stderr)
        return FAILED
    return OK


HANDLERS = {"scatter": _scatter, "theta": _theta, "verify-exp": _verify_exp, "validate": _validate,
            "cylinder": _cylinder, "subdivide": _subdivide}


def run(cfg: RunConfig) -> int:
    """Execute one command and map failures to exit codes."""
    try:
        thread_cap()
        return HANDLERS[cfg.command](cfg)
    except (InputError, FormatError, TypeError_, SeriesError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except (InconsistentDiagramError, MonodromyError, NonGenericError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return FAILED
    except (ScatteringError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trop-scatter", description="Exact scattering diagrams, theta functions and tropical counts.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, *flags):
        p = sub.add_parser(name, help=help_text)
        for flag in flags:
            if flag in ("p", "q"):
                p.add_argument(f"-{flag}", type=_vector, required=True, help="lattice vector like 1,0")
            elif flag == "ray":
                p.add_argument("--ray", type=_vector, required=True, help="primitive ray to insert, like 1,1")
            elif flag == "kind":
                p.add_argument("--kind", required=True, choices=("wall", "broken_line", "broken-line", "cylinder"))
            elif flag == "order":
                p.add_argument("--order", type=int)
            else:
                p.add_argument(f"--{flag}", type=Path)
        return p

    add("scatter", "complete a seed or an initial diagram to a consistent diagram", "seed", "diagram", "order", "out", "svg")
    add("theta", "theta function structure constants", "diagram", "p", "q", "order", "out", "svg")
    add("verify-exp", "check the exponential formula on a coefficient table", "table", "order")
    add("validate", "validate a tropical type", "type", "kind")
    add("cylinder", "assemble a cylinder count from weighted types", "spine", "types", "out", "svg")
    add("subdivide", "star-subdivide and recompute, or refine a spine", "diagram", "spine", "ray", "order", "out", "svg")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    try:
        cfg = RunConfig(**fields)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    if cfg.command == "scatter" and (cfg.seed is None) == (cfg.diagram is None):
        print("error: scatter needs exactly one of --seed and --diagram", file=sys.stderr)
        return BAD_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
