"""Command-line front end.  Every command prints one RunReport.

Exit codes: 0 positive (nonempty, verified, proved), 1 negative (empty,
refuted), 2 unknown or out of budget, 64 usage error, 65 malformed input.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import attractor as att
from . import blockcode as bc
from . import eds
from . import multidim as md
from . import onedim
from .dyadic import format_cell, parse_cell, parse_cells
from .errors import (
    AlphabetMismatch, BudgetExhausted, DimensionMismatch, DomainViolation, FormatError,
    InvalidPartition, SftLabError, SupportCapExceeded, TrapRejected,
)
from .oracles import parse_oracle
from .patterns import Pattern, SftSpec, count_admissible, parse_sft
from .report import (
    EXIT_FORMAT, EXIT_NEGATIVE, EXIT_POSITIVE, EXIT_UNKNOWN, EXIT_USAGE, RunReport, digest,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class _Inputs:
    """Reads input files and remembers their bytes for the report digest."""

    def __init__(self):
        self.parts: list[bytes] = []

    def text(self, path: str) -> str:
        try:
            data = Path(path).read_bytes()
        except OSError as e:
            raise UsageError(f"cannot read {path}: {e.strerror}") from None
        self.parts.append(data)
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError(f"{path} is not UTF-8 text") from None


def _load_shift(inp: _Inputs, path: str) -> SftSpec:
    """An SFT file, or a Wang tile set (first word ``tile``)."""
    text = inp.text(path)
    first = next((line.split()[0] for line in text.splitlines()
                  if line.split("#", 1)[0].strip()), "")
    if first == "tile":
        return md.wang_to_sft(md.parse_wang(text))
    return parse_sft(text)


def _parse_values(text: str, spec_alphabet, dim: int) -> Pattern:
    """A word (1D) or rows separated by '/' (2D), placed at the origin."""
    try:
        return _values_pattern(text, spec_alphabet, dim)
    except KeyError as e:
        raise FormatError(e.args[0]) from None


def _values_pattern(text: str, spec_alphabet, dim: int) -> Pattern:
    if dim == 1:
        return Pattern.from_word(spec_alphabet.parse_word(text))
    if dim == 2:
        rows = [spec_alphabet.parse_word(r) for r in text.split("/")]
        if len({len(r) for r in rows}) != 1:
            raise FormatError("rows must have equal length")
        return Pattern.from_grid(rows)
    raise UsageError("patterns on the command line are limited to dimensions 1 and 2")


def _pattern_text(p: Pattern, alphabet) -> str:
    box = p.bounding_box
    if p.dim == 1:
        return alphabet.format_word(p.values_on(box))
    if p.dim == 2:
        (a0, b0), (a1, b1) = zip(box.lo, box.hi)
        return "/".join(alphabet.format_word([p.mapping[(i, j)] for j in range(b0, b1 + 1)])
                        for i in range(a0, a1 + 1))
    return repr(p.cells)


# --- commands ------------------------------------------------------------------------------

def cmd_check_empty_1d(a, inp, rep):
    spec = _load_shift(inp, a.file)
    if spec.dim != 1:
        raise DimensionMismatch(f"{a.file} has dimension {spec.dim}")
    graph = onedim.build_transfer_graph(spec)
    alive, rounds = onedim.prune(graph)
    rep.add(vertices=len(graph.vertices), edges=len(graph.edges), pruning_rounds=rounds,
            surviving=len(alive))
    found = onedim.periodic_point_1d(spec)
    if found is None:
        rep.add(verdict="empty")
        return EXIT_NEGATIVE
    p, word = found
    rep.add(verdict="nonempty", period=p, word=spec.alphabet.format_word(word))
    return EXIT_POSITIVE


def cmd_check_empty(a, inp, rep):
    spec = _load_shift(inp, a.file)
    if a.dim is not None and a.dim != spec.dim:
        raise DimensionMismatch(f"{a.file} has dimension {spec.dim}, not {a.dim}")
    v = md.semidecide_empty(spec, max_radius=a.fuel, node_budget=a.budget, max_period=a.max_period)
    rep.add(**md.verdict_record(v, spec.alphabet))
    if isinstance(v, md.ProvedNonempty):
        if a.cert_out:
            Path(a.cert_out).write_text(md.write_torus(v.cert, spec.alphabet))
        return EXIT_POSITIVE
    if isinstance(v, md.ProvedEmpty):
        return EXIT_NEGATIVE
    return EXIT_UNKNOWN


def cmd_verify_cert(a, inp, rep):
    spec = _load_shift(inp, a.file)
    cert = md.parse_torus(inp.text(a.cert), spec.alphabet)
    ok = md.verify_torus(spec, cert)
    rep.add(periods=list(cert.periods), verified=ok)
    return EXIT_POSITIVE if ok else EXIT_NEGATIVE


def cmd_count(a, inp, rep):
    spec = _load_shift(inp, a.file)
    try:
        c = count_admissible(spec, a.n, a.budget)
    except BudgetExhausted as e:
        rep.add(count=None, nodes=e.spent)
        return EXIT_UNKNOWN
    rep.add(n=a.n, count=c, entropy_upper=math.log(c) / a.n ** spec.dim if c else None)
    return EXIT_POSITIVE


def cmd_code_apply(a, inp, rep):
    code = bc.parse_code(inp.text(a.code))
    p = _parse_values(a.values, code.src, code.dim)
    out = bc.apply_to_pattern(code, p)
    rep.add(output=_pattern_text(out, code.dst))
    return EXIT_POSITIVE


def cmd_code_verify(a, inp, rep):
    src, dst = _load_shift(inp, a.src), _load_shift(inp, a.dst)
    code = bc.parse_code(inp.text(a.code))
    R = bc.factor_radius(src, dst)
    r = a.r if a.r is not None else R + code.radius + 2
    rep.add(R=R, k=code.radius, r=r)
    try:
        ok = bc.verify_factor_step(src, dst, code, r, a.budget)
    except BudgetExhausted as e:
        rep.add(verified=None, nodes=e.spent)
        return EXIT_UNKNOWN
    rep.add(verified=ok)
    return EXIT_POSITIVE if ok else EXIT_NEGATIVE


def cmd_code_search(a, inp, rep):
    src, dst = _load_shift(inp, a.src), _load_shift(inp, a.dst)
    found = bc.search_factor(src, dst, a.max_k, a.max_r, rule_budget=a.rule_budget,
                             node_budget=a.budget)
    if found is None:
        rep.add(found=False)
        return EXIT_UNKNOWN
    code, r = found
    rep.add(found=True, k=code.radius, r=r, window=len(code.window))
    rep.blocks["code"] = bc.write_code(code)
    if a.out:
        Path(a.out).write_text(bc.write_code(code))
    return EXIT_POSITIVE


def cmd_ca_limit(a, inp, rep):
    ca = bc.parse_code(inp.text(a.code))
    sizes = []
    lang = None
    for t in range(a.t + 1):
        try:
            lang = bc.ca_image_language(ca, t, a.n, a.budget)
        except BudgetExhausted:
            rep.add(sizes=sizes, t_reached=t - 1)
            return EXIT_UNKNOWN
        sizes.append(len(lang))
    rep.add(n=a.n, sizes=sizes, quiescent=[ca.src.name(s) for s in sorted(bc.quiescent_fixed_points(ca))])
    if ca.dim == 1:
        rep.blocks["words"] = "\n".join(sorted(ca.src.format_word(p.word()) for p in lang))
    return EXIT_POSITIVE


def _stage_report(rep, stage: eds.StageSet, bit_cap: int):
    rep.add(excluded=len(stage))
    rep.blocks["excluded"] = eds.write_gencyls(stage.dim, stage.excluded)
    if stage.dim == 1:
        empty = stage.is_empty_1d(bit_cap)
        rep.add(verdict="empty" if empty else "nonempty")
        return EXIT_NEGATIVE if empty else EXIT_POSITIVE
    rep.add(verdict="not-decided")
    return EXIT_UNKNOWN


def cmd_eds_stage(a, inp, rep):
    enum = eds.parse_script(inp.text(a.script))
    if a.guarded:
        kept, fired = eds.guard_trace(enum, a.k, a.bit_cap)
        rep.add(guard_fired=fired)
        stage = eds.StageSet(1, tuple(kept))
    else:
        stage = eds.StageSet(enum.dim, tuple(enum.step(a.k)))
    return _stage_report(rep, stage, a.bit_cap)


def cmd_eds_product(a, inp, rep):
    lanes = [eds.parse_script(inp.text(p)) for p in a.scripts]
    master = eds.MasterEnumerator(lanes)
    rep.add(lane_steps=[master.lane_steps(a.k)[n] for n in range(len(lanes))])
    return _stage_report(rep, eds.product_stage(master, a.k), a.bit_cap)


def cmd_eds_universal(a, inp, rep):
    registry = [eds.parse_script(inp.text(p)) for p in a.scripts]
    lanes = eds.universal_lanes(a.k, registry, a.bit_cap)
    rep.add(lanes=len(lanes), lane_sizes=[len(lanes[n]) for n in sorted(lanes)])
    stage = eds.StageSet(1, tuple(eds.lift_gencyl(n, g) for n, st in lanes.items() for g in st))
    rep.add(excluded=len(stage), verdict="nonempty")
    rep.blocks["excluded"] = eds.write_gencyls(1, stage.excluded)
    return EXIT_POSITIVE


def cmd_eds_verify_partition(a, inp, rep):
    enum = eds.parse_script(inp.text(a.script))
    part = eds.parse_partition(inp.text(a.partition))
    dst = _load_shift(inp, a.dst)
    stage = eds.StageSet(enum.dim, tuple(enum.step(a.k)))
    try:
        ok = eds.verify_partition_factor(stage, part, dst, a.n, a.r, a.budget)
    except BudgetExhausted as e:
        rep.add(verified=None, nodes=e.spent)
        return EXIT_UNKNOWN
    rep.add(verified=ok)
    return EXIT_POSITIVE if ok else EXIT_NEGATIVE


def _cell_arg(text: str, dim: int):
    cell = parse_cell("cell " + text)
    if cell.dim != dim:
        raise DimensionMismatch(f"cell has dimension {cell.dim}, the map {dim}")
    return cell


def _load_attractor(a, inp):
    oracle = parse_oracle(inp.text(a.oracle))
    trap = att.TrapRegion(tuple(parse_cells(inp.text(a.trap))))
    att.check_trap(oracle, trap)
    return oracle, trap


def cmd_att_image(a, inp, rep):
    oracle = parse_oracle(inp.text(a.oracle))
    cell = _cell_arg(a.cell, oracle.dim)
    pts = att.approx_image(oracle, cell, a.n)
    rep.add(cell=format_cell(cell)[5:], n=a.n, points=len(pts))
    rep.blocks["points"] = "\n".join(" ".join(str(c) for c in p) for p in pts)
    return EXIT_POSITIVE


def cmd_att_test_cell(a, inp, rep):
    oracle, trap = _load_attractor(a, inp)
    cell = _cell_arg(a.cell, oracle.dim)
    v = att.semidecide_cell_avoids_attractor(oracle, trap, cell, a.fuel)
    if isinstance(v, att.ProvedDisjoint):
        rep.add(verdict="ProvedDisjoint", n=v.n)
        return EXIT_POSITIVE
    rep.add(verdict="Unknown", fuel_spent=v.fuel_spent)
    return EXIT_UNKNOWN


def cmd_att_encode(a, inp, rep):
    oracle, trap = _load_attractor(a, inp)
    cyls = att.enumerate_forbidden_cylinders(oracle, trap, a.fuel, a.depth)
    rep.add(fuel=a.fuel, depth=a.depth, emitted=len(cyls))
    text = eds.write_gencyls(1, cyls)
    if a.out:
        Path(a.out).write_text(text)
    else:
        rep.blocks["emitted"] = text
    return EXIT_POSITIVE


def cmd_corpus_run(a, inp, rep):
    from .corpus import run_corpus
    summary = run_corpus(a.path, inp)
    rep.add(entries=summary.total, passed=summary.passed, failed=summary.total - summary.passed,
            mismatches=len(summary.mismatches))
    if summary.mismatches:
        rep.blocks["mismatches"] = "\n".join(summary.mismatches)
    rep.blocks["results"] = "\n".join(summary.lines) if summary.lines else "(empty corpus)"
    return EXIT_POSITIVE if not summary.mismatches else EXIT_NEGATIVE


# --- parser --------------------------------------------------------------------------------

def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _natural(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sftlab", description="Shifts of finite type, block codes, effective subshifts.")
    p.add_argument("--format", choices=("text", "compact"), default="text")
    p.add_argument("--jobs", type=_positive, default=1, help="worker cap (work runs sequentially)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def leaf(parent, name, fn: Callable, help_text: str):
        q = parent.add_parser(name, help=help_text, description=help_text)
        q.set_defaults(fn=fn, command_name=name)
        return q

    q = leaf(sub, "check-empty-1d", cmd_check_empty_1d, "exact emptiness of a 1D SFT")
    q.add_argument("file")

    q = leaf(sub, "check-empty", cmd_check_empty, "budgeted emptiness semi-decision (any dimension)")
    q.add_argument("file", help="SFT file or Wang tile set")
    q.add_argument("--dim", type=_positive)
    q.add_argument("--fuel", type=_positive, default=4, help="largest radius / period tried")
    q.add_argument("--max-period", type=_positive)
    q.add_argument("--budget", type=_positive, default=1_000_000, help="search node budget")
    q.add_argument("--cert-out")

    q = leaf(sub, "verify-cert", cmd_verify_cert, "check a torus certificate")
    q.add_argument("file")
    q.add_argument("cert")

    q = leaf(sub, "count", cmd_count, "count admissible patterns on [0, n-1]^d")
    q.add_argument("file")
    q.add_argument("--n", type=_positive, required=True)
    q.add_argument("--budget", type=_positive, default=10_000_000)

    code = sub.add_parser("code", help="sliding block codes").add_subparsers(
        dest="code_command", required=True, parser_class=_Parser)
    q = leaf(code, "apply", cmd_code_apply, "apply a block code to a word or 2D grid")
    q.add_argument("code")
    q.add_argument("values", help="word, or rows separated by '/'")
    q = leaf(code, "verify", cmd_code_verify, "finite-stage factor check")
    for name in ("src", "dst", "code"):
        q.add_argument(name)
    q.add_argument("--r", type=_positive, help="defaults to R + k + 2")
    q.add_argument("--budget", type=_positive, default=1_000_000)
    q = leaf(code, "search", cmd_code_search, "search (k, r, rule) for a passing block code")
    q.add_argument("src")
    q.add_argument("dst")
    q.add_argument("--max-k", type=_natural, default=1)
    q.add_argument("--max-r", type=_positive, default=4)
    q.add_argument("--rule-budget", type=_positive, default=10_000)
    q.add_argument("--budget", type=_positive, default=1_000_000)
    q.add_argument("--out")

    ca = sub.add_parser("ca", help="cellular automata").add_subparsers(
        dest="ca_command", required=True, parser_class=_Parser)
    q = leaf(ca, "limit", cmd_ca_limit, "image languages of f^t on [0, n-1]^d for t = 0..T")
    q.add_argument("code")
    q.add_argument("--t", type=_natural, required=True)
    q.add_argument("--n", type=_positive, required=True)
    q.add_argument("--budget", type=_positive, default=1_000_000)

    e = sub.add_parser("eds", help="effective subshifts").add_subparsers(
        dest="eds_command", required=True, parser_class=_Parser)
    q = leaf(e, "stage", cmd_eds_stage, "stage-k exclusions of a scripted enumerator")
    q.add_argument("script")
    q.add_argument("--k", type=_natural, required=True)
    q.add_argument("--guarded", action="store_true")
    q = leaf(e, "product", cmd_eds_product, "stage-k exclusions of the product of lanes")
    q.add_argument("scripts", nargs="*")
    q.add_argument("--k", type=_natural, required=True)
    q = leaf(e, "universal", cmd_eds_universal, "stage-k universal system over a registry")
    q.add_argument("scripts", nargs="*")
    q.add_argument("--k", type=_natural, required=True)
    q = leaf(e, "verify-partition", cmd_eds_verify_partition, "clopen-partition factor check")
    q.add_argument("script")
    q.add_argument("partition")
    q.add_argument("dst")
    q.add_argument("--k", type=_natural, required=True, help="enumeration steps")
    q.add_argument("--n", type=_natural, required=True, help="exclusion window radius")
    q.add_argument("--r", type=_positive, required=True, help="symbolization radius")
    q.add_argument("--budget", type=_positive, default=1_000_000)
    for q in e.choices.values():
        if "bit_cap" not in {a.dest for a in q._actions}:
            q.add_argument("--bit-cap", type=_positive, default=onedim.DEFAULT_BIT_CAP)

    at = sub.add_parser("attractor", help="effective attractors").add_subparsers(
        dest="att_command", required=True, parser_class=_Parser)
    q = leaf(at, "image", cmd_att_image, "approximate image of a dyadic cell")
    q.add_argument("oracle")
    q.add_argument("--cell", required=True, help="'level=N corner=k1,...'")
    q.add_argument("--n", type=_positive, required=True)
    q = leaf(at, "test-cell", cmd_att_test_cell, "semi-decide that a cell avoids the attractor")
    q.add_argument("oracle")
    q.add_argument("trap")
    q.add_argument("--cell", required=True)
    q.add_argument("--fuel", type=_positive, default=32)
    q = leaf(at, "encode", cmd_att_encode, "forbidden cylinders of the subshift presentation")
    q.add_argument("oracle")
    q.add_argument("trap")
    q.add_argument("--fuel", type=_positive, required=True)
    q.add_argument("--depth", type=_positive, default=3)
    q.add_argument("--out")

    c = sub.add_parser("corpus", help="expectation corpus").add_subparsers(
        dest="corpus_command", required=True, parser_class=_Parser)
    q = leaf(c, "run", cmd_corpus_run, "run every corpus entry and compare")
    q.add_argument("path")
    return p


def _command_path(a) -> str:
    parts = [a.command]
    for attr in ("code_command", "ca_command", "eds_command", "att_command", "corpus_command"):
        if getattr(a, attr, None):
            parts.append(getattr(a, attr))
    return " ".join(parts)


def run(argv: Sequence[str], out: io.TextIOBase | None = None) -> tuple[int, RunReport]:
    """Execute one command; returns the exit code and the report (also printed)."""
    out = sys.stdout if out is None else out
    fmt = "compact" if "--format=compact" in argv or _format_flag(argv) == "compact" else "text"
    inp = _Inputs()
    try:
        a = build_parser().parse_args(list(argv))
    except UsageError as e:
        rep = RunReport("usage", exit_code=EXIT_USAGE).add(error="usage", message=str(e))
        out.write(rep.to_compact() if fmt == "compact" else rep.to_text())
        return EXIT_USAGE, rep
    rep = RunReport(_command_path(a))
    try:
        code = a.fn(a, inp, rep)
    except UsageError as e:
        rep.fields = {"error": "usage", "message": str(e)}
        rep.blocks = {}
        code = EXIT_USAGE
    except (FormatError, InvalidPartition, TrapRejected) as e:
        rep.fields = {"error": type(e).__name__, "message": str(e)}
        rep.blocks = {}
        code = EXIT_FORMAT
    except (DimensionMismatch, AlphabetMismatch, DomainViolation, SupportCapExceeded, ValueError) as e:
        rep.fields = {"error": type(e).__name__, "message": str(e)}
        rep.blocks = {}
        code = EXIT_USAGE
    except (BudgetExhausted, SftLabError) as e:
        rep.fields = {"error": type(e).__name__, "message": str(e)}
        rep.blocks = {}
        code = EXIT_UNKNOWN
    rep.exit_code = code
    options = sorted((k, repr(v)) for k, v in vars(a).items()
                     if k not in ("fn", "format", "jobs") and not callable(v))
    rep.inputs = digest([repr(options).encode()] + inp.parts)
    out.write(rep.to_compact() if a.format == "compact" else rep.to_text())
    return code, rep


def _format_flag(argv: Sequence[str]) -> str | None:
    argv = list(argv)
    for i, tok in enumerate(argv[:-1]):
        if tok == "--format":
            return argv[i + 1]
    return None


def main(argv: Sequence[str] | None = None) -> int:
    code, _ = run(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
