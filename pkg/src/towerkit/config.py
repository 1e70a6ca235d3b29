"""Run configuration: defaults, an optional key=value file, then flags.

The file is looked up at ``$TOWERKIT_CONFIG`` if set, else ``./towerkit.cfg``.
Lines look like ``cap_ceiling = 16``; ``#`` starts a comment.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from towerkit.magnus import DEFAULT_CAP_CEILING, DEFAULT_TERM_BOUND
from towerkit.tower import DEFAULT_WORD_LENGTH_CEILING

ENV_VAR = "TOWERKIT_CONFIG"
DEFAULT_PATH = "towerkit.cfg"
FORMATS = ("text", "json")


@dataclass(frozen=True)
class RunConfig:
    cap_ceiling: int = DEFAULT_CAP_CEILING
    word_length_ceiling: int = DEFAULT_WORD_LENGTH_CEILING
    term_bound: int = DEFAULT_TERM_BOUND
    seed: int | None = None
    output: str = "text"
    workers: int = 1

    def __post_init__(self):
        for name in ("cap_ceiling", "word_length_ceiling", "term_bound", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.output not in FORMATS:
            raise ValueError(f"output must be one of {FORMATS}")

    def updated(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def parse_config(text: str) -> dict:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string("[towerkit]\n" + text)
    known = {f.name: f for f in fields(RunConfig)}
    out = {}
    for key, raw in cp["towerkit"].items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        out[key] = raw if key == "output" else int(raw)
    return out


def load_config(path: str | os.PathLike | None = None) -> RunConfig:
    if path is None:
        path = os.environ.get(ENV_VAR) or DEFAULT_PATH
        if not Path(path).exists():
            if os.environ.get(ENV_VAR):
                raise FileNotFoundError(f"config file {path} (from ${ENV_VAR}) not found")
            return RunConfig()
    return RunConfig(**parse_config(Path(path).read_text()))
