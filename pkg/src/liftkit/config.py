"""Brute-force caps and run configuration."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from typing import Optional

ENV_VAR = "LIFTKIT_CAP"


@dataclass(frozen=True)
class Caps:
    """Largest arity each exhaustive routine accepts."""

    dt_depth: int = 6
    dt_size: int = 5
    pdt_depth: int = 6
    pdt_size: int = 6
    nadt: int = 5
    napdt: int = 4
    evaluate: int = 16
    cnf: int = 16

    def with_overrides(self, **kw) -> "Caps":
        return dataclasses.replace(self, **kw)


def parse_caps(text: str, base: Optional[Caps] = None) -> Caps:
    """``"8"`` sets every cap; ``"pdt_size=7,napdt=6"`` sets named ones."""
    base = base or Caps()
    text = text.strip()
    if not text:
        return base
    if text.isdigit():
        v = int(text)
        return Caps(**{f.name: v for f in dataclasses.fields(Caps)})
    kw = {}
    names = {f.name for f in dataclasses.fields(Caps)}
    for part in text.split(","):
        key, _, val = part.partition("=")
        key = key.strip().replace("-", "_")
        if key not in names or not val.strip().isdigit():
            raise ValueError(f"bad {ENV_VAR} entry {part!r}")
        kw[key] = int(val)
    return base.with_overrides(**kw)


def caps_from_env() -> Caps:
    return parse_caps(os.environ.get(ENV_VAR, ""))


@dataclass
class RunConfig:
    command: str
    gadget: Optional[str] = None
    k: Optional[int] = None
    mode: str = "depth"
    inputs: list = field(default_factory=list)
    output: Optional[str] = None
    seed: int = 0
    caps: Caps = field(default_factory=caps_from_env)
    fmt: str = "text"

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        d["caps"] = dataclasses.asdict(self.caps)
        return d
