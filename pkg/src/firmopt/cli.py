"""Batch command-line front end for the read / verify / optimize / write
pipeline.  Diagnostics go to stderr; data goes to files or stdout only.
Exit codes: 0 success, 1 any error diagnostic, 2 usage error."""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from . import bridge, gxl, interp, opt, verify
from .dot import to_dot
from .firm import FirmGraph, FloatV, IntV, Mode, mode_int_range


def _print_diags(diags: list[gxl.Diagnostic]) -> None:
    for diag in diags:
        print(diag.render(), file=sys.stderr)


def _write_atomic(path: str, data: bytes) -> None:
    # temp file + rename, so a failed run never truncates a prior result
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=target.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _load(path: str) -> tuple[gxl.GxlDocument | None, list[gxl.Diagnostic]]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        return None, [gxl.error(None, f"cannot read {path}: {exc.strerror}")]
    return gxl.parse_gxl(data, document_id=path)


def _decode(path: str) -> tuple[bridge.DecodeResult | None, gxl.GxlDocument | None]:
    doc, diags = _load(path)
    _print_diags(diags)
    if doc is None:
        return None, None
    result = bridge.decode(doc)
    _print_diags(result.diagnostics)
    if result.graph is None:
        return None, doc
    return result, doc


def _object_graph_id(doc: gxl.GxlDocument) -> str:
    _, objectmodel = bridge.classify_graphs(doc)
    return objectmodel.id if objectmodel is not None else "model"


def _cmd_verify(args) -> int:
    result, _ = _decode(args.input)
    if result is None:
        return 1
    diags = verify.check(result.graph)
    _print_diags(diags)
    return 1 if gxl.has_errors(diags) else 0


def _encode_out(result: bridge.DecodeResult, graph: FirmGraph, graph_id: str, out: str) -> int:
    try:
        doc = bridge.encode(graph, result.metamodel, result.classname_to_meta_id, graph_id)
    except bridge.EncodeError as exc:
        _print_diags([gxl.error(None, str(exc))])
        return 1
    _write_atomic(out, gxl.serialize_gxl(doc))
    return 0


def _cmd_opt(args) -> int:
    result, doc = _decode(args.input)
    if result is None:
        return 1
    diags = verify.check(result.graph)
    _print_diags(diags)
    if gxl.has_errors(diags):
        return 1

    enabled = frozenset(name for name in opt.ALL_PASSES if name not in (args.disable_pass or []))
    options = opt.OptimizeOptions(
        max_iterations=args.max_iter,
        enabled=enabled,
        fold_cmp=not args.no_cmp_fold,
        emit_dot_after_each_stage=args.dot_dir is not None,
    )

    stage_hook = None
    if args.dot_dir is not None:
        dot_dir = Path(args.dot_dir)
        dot_dir.mkdir(parents=True, exist_ok=True)
        counter = [0]

        def stage_hook(label: str, graph: FirmGraph) -> None:
            counter[0] += 1
            _write_atomic(
                str(dot_dir / f"{counter[0]:03d}-{label}.dot"), to_dot(graph).encode()
            )

        _write_atomic(str(dot_dir / "000-decoded.dot"), to_dot(result.graph).encode())

    opt_diags: list[gxl.Diagnostic] = []
    graph, _reports = opt.optimize(result.graph, options, opt_diags, stage_hook)
    _print_diags(opt_diags)

    post = verify.check(graph)
    if gxl.has_errors(post):
        _print_diags(post)
        return 1
    status = _encode_out(result, graph, _object_graph_id(doc), args.output)
    if status:
        return status
    return 1 if gxl.has_errors(opt_diags) else 0


def _cmd_roundtrip(args) -> int:
    result, doc = _decode(args.input)
    if result is None:
        return 1
    return _encode_out(result, result.graph, _object_graph_id(doc), args.output)


def _cmd_dot(args) -> int:
    result, _ = _decode(args.input)
    if result is None:
        return 1
    _write_atomic(args.output, to_dot(result.graph).encode())
    return 0


def _parse_args_values(text: str) -> list:
    values = []
    if not text:
        return values
    for token in text.split(","):
        token = token.strip()
        if any(ch in token for ch in ".eE") and not token.lstrip("+-").isdigit():
            values.append(FloatV(Mode.F, float(token)))
        else:
            value = int(token, 10)
            lo, hi = mode_int_range(Mode.Is)
            if not lo <= value <= hi:
                raise ValueError(f"argument does not fit mode Is: {token}")
            values.append(IntV(Mode.Is, value))
    return values


def _cmd_eval(args) -> int:
    result, _ = _decode(args.input)
    if result is None:
        return 1
    try:
        values = _parse_args_values(args.args)
    except ValueError as exc:
        _print_diags([gxl.error(None, str(exc))])
        return 1
    outcome = interp.evaluate(result.graph, values, step_limit=args.step_limit)
    if isinstance(outcome, interp.EvalStatus):
        _print_diags([gxl.error(None, f"evaluation failed: {outcome.value}")])
        return 1
    for value in outcome:
        if isinstance(value, IntV):
            print(f"{value.mode.value} {value.value}")
        elif isinstance(value, FloatV):
            print(f"{value.mode.value} {value.value!r}")
        else:
            print(f"b {value.value}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firmopt",
        description="Read, verify and optimize GXL-encoded Firm program graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="parse, decode and run the consistency checks")
    p_verify.add_argument("input")
    p_verify.set_defaults(func=_cmd_verify)

    p_opt = sub.add_parser("opt", help="run the full optimization pipeline")
    p_opt.add_argument("input")
    p_opt.add_argument("-o", "--output", required=True)
    p_opt.add_argument("--max-iter", type=int, default=16, metavar="N")
    p_opt.add_argument(
        "--disable-pass",
        action="append",
        choices=list(opt.ALL_PASSES),
        metavar="NAME",
        help=f"disable one pass (choices: {', '.join(opt.ALL_PASSES)})",
    )
    p_opt.add_argument("--no-cmp-fold", action="store_true")
    p_opt.add_argument("--dot-dir", metavar="DIR", help="write a DOT dump after each stage")
    p_opt.set_defaults(func=_cmd_opt)

    p_dot = sub.add_parser("dot", help="decode and render to GraphViz DOT")
    p_dot.add_argument("input")
    p_dot.add_argument("-o", "--output", required=True)
    p_dot.set_defaults(func=_cmd_dot)

    p_rt = sub.add_parser("roundtrip", help="decode and re-encode without optimizing")
    p_rt.add_argument("input")
    p_rt.add_argument("-o", "--output", required=True)
    p_rt.set_defaults(func=_cmd_roundtrip)

    p_eval = sub.add_parser("eval", help="evaluate the graph on constant arguments")
    p_eval.add_argument("input")
    p_eval.add_argument("--args", default="", help="comma-separated argument values")
    p_eval.add_argument("--step-limit", type=int, default=10_000)
    p_eval.set_defaults(func=_cmd_eval)
    return parser


def run(argv=None) -> int:
    """Entry point returning the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    return args.func(args)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
