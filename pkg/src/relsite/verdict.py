from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Verdict:
    """Outcome of a check: a boolean, the first witness of failure, and named sub-verdicts."""

    ok: bool
    witness: Any = None
    parts: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    @classmethod
    def all_of(cls, parts: dict) -> "Verdict":
        for name, v in parts.items():
            if not v.ok:
                return cls(False, {"part": name, "witness": v.witness}, parts)
        return cls(True, None, parts)

    def as_dict(self) -> dict:
        out = {"ok": self.ok, "witness": self.witness}
        if self.parts:
            out["parts"] = {k: v.as_dict() for k, v in self.parts.items()}
        return out
