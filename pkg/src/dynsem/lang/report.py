"""JSON run reports (schema version "1")."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources

SCHEMA_VERSION = "1"


@dataclass
class CommandResult:
    command: str
    target: str
    engine: str
    position: str
    verdict: str | None = None
    trace: list | None = None
    bindings: dict | None = None
    probabilities: dict | None = None
    order_effects: dict | None = None


@dataclass
class RunReport:
    results: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
        return cls(
            results=[CommandResult(**r) for r in data["results"]],
            diagnostics=list(data["diagnostics"]),
            schema_version=data["schema_version"],
        )

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def load_schema() -> dict:
    text = resources.files("dynsem").joinpath("data/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)
