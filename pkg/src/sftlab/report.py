"""Deterministic run reports: ordered key=value lines, or one compact JSON line."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_FORMAT = 65


def digest(parts: list[bytes]) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(len(p).to_bytes(8, "big"))
        h.update(p)
    return h.hexdigest()[:16]


def _render(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, (list, tuple)):
        return ",".join(_render(v) for v in value)
    if value is None:
        return "-"
    text = str(value)
    return text.replace("\\", "\\\\").replace("\n", "\\n")


@dataclass
class RunReport:
    command: str
    inputs: str = ""
    exit_code: int = 0
    fields: dict[str, Any] = field(default_factory=dict)
    blocks: dict[str, str] = field(default_factory=dict)

    def add(self, **kv: Any) -> "RunReport":
        self.fields.update(kv)
        return self

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"command": self.command, "inputs": self.inputs}
        out.update(self.fields)
        out["exit"] = self.exit_code
        if self.blocks:
            out["blocks"] = dict(self.blocks)
        return out

    def lookup(self, key: str) -> str | None:
        """Rendered value of a field, as compared by the corpus driver."""
        d = self.as_dict()
        return _render(d[key]) if key in d else None

    def to_text(self) -> str:
        lines = [f"command={self.command}", f"inputs={self.inputs}"]
        lines += [f"{k}={_render(v)}" for k, v in self.fields.items()]
        lines.append(f"exit={self.exit_code}")
        for name, body in self.blocks.items():
            lines.append(f"begin {name}")
            lines.extend(body.rstrip("\n").split("\n"))
            lines.append(f"end {name}")
        return "\n".join(lines) + "\n"

    def to_compact(self) -> str:
        def conv(v):
            if isinstance(v, tuple):
                return [conv(x) for x in v]
            if isinstance(v, list):
                return [conv(x) for x in v]
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            if isinstance(v, (int, float, str, bool)) or v is None:
                return v
            return str(v)
        return json.dumps({k: conv(v) for k, v in self.as_dict().items()}, separators=(",", ":")) + "\n"
