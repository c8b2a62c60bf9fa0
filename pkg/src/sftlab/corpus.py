"""Expectation corpus: INI sections naming a command line and the report fields it
must produce.

    [golden-mean-1d]
    run = check-empty-1d golden-mean.sft
    expect = exit=0 word=0
    basis = the all-zero sequence avoids 11

File arguments resolve relative to the corpus file.  ``basis`` records how the
expected values were obtained and is required.
"""

from __future__ import annotations

import configparser
import io
import os
import shlex
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    argv: tuple[str, ...]
    expect: tuple[tuple[str, str], ...]
    basis: str


@dataclass
class CorpusSummary:
    total: int = 0
    passed: int = 0
    mismatches: list[str] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)


def parse_corpus(text: str) -> list[CorpusEntry]:
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",),
                                   inline_comment_prefixes=None)
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise FormatError(f"corpus does not parse: {e.message if hasattr(e, 'message') else e}") from None
    entries = []
    for name in cp.sections():
        sec = cp[name]
        missing = [k for k in ("run", "expect", "basis") if not sec.get(k, "").strip()]
        if missing:
            raise FormatError(f"entry {name!r} lacks {', '.join(missing)}")
        extra = set(sec) - {"run", "expect", "basis"}
        if extra:
            raise FormatError(f"entry {name!r} has unknown keys {sorted(extra)}")
        expect = []
        for tok in shlex.split(sec["expect"]):
            key, eq, val = tok.partition("=")
            if not eq or not key:
                raise FormatError(f"entry {name!r}: bad expectation {tok!r}")
            expect.append((key, val))
        entries.append(CorpusEntry(name, tuple(shlex.split(sec["run"])), tuple(expect),
                                   " ".join(sec["basis"].split())))
    return entries


def run_entry(entry: CorpusEntry, base: Path) -> list[str]:
    """Mismatch descriptions (empty when the entry passes)."""
    from .cli import run

    cwd = os.getcwd()
    os.chdir(base)
    try:
        _, rep = run(entry.argv, out=io.StringIO())
    finally:
        os.chdir(cwd)
    problems = []
    for key, want in entry.expect:
        got = rep.lookup(key)
        if got != want:
            problems.append(f"{entry.name}: {key} expected {want} got {got if got is not None else '(missing)'}")
    return problems


def run_corpus(path: str, inputs=None) -> CorpusSummary:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise FormatError(f"cannot read corpus {path}: {e.strerror}") from None
    if inputs is not None:
        inputs.parts.append(text.encode())
    summary = CorpusSummary()
    for entry in parse_corpus(text):
        summary.total += 1
        problems = run_entry(entry, p.parent)
        summary.mismatches.extend(problems)
        if problems:
            summary.lines.append(f"{entry.name} FAIL")
        else:
            summary.passed += 1
            summary.lines.append(f"{entry.name} pass")
    return summary
