"""Frozen regression counts.

One record per line, ``key=<hash> count=<decimal>``; lines starting with
``#`` are comments and carry the readable parameter string.
"""
from __future__ import annotations

import hashlib
from importlib import resources
from pathlib import Path


def params_key(kind: str, **params) -> tuple[str, str]:
    text = kind + "|" + "|".join(f"{k}={params[k]}" for k in sorted(params))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16], text


def default_path() -> Path:
    return Path(str(resources.files("quivjet") / "data" / "baselines.txt"))


class Baselines:
    def __init__(self, path: str | Path | None = None) -> None:
        self.path = Path(path) if path else default_path()
        self.records: dict[str, int] = {}
        self.labels: dict[str, str] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        label = None
        for line in self.path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                label = line[1:].strip()
                continue
            fields = dict(part.split("=", 1) for part in line.split())
            key = fields["key"]
            self.records[key] = int(fields["count"])
            if label:
                self.labels[key] = label
            label = None

    def get(self, kind: str, **params) -> int | None:
        return self.records.get(params_key(kind, **params)[0])

    def set(self, kind: str, count: int, **params) -> None:
        key, label = params_key(kind, **params)
        self.records[key] = int(count)
        self.labels[key] = label

    def save(self, path: str | Path | None = None) -> Path:
        path = Path(path) if path else self.path
        lines = []
        for key in sorted(self.records, key=lambda k: (self.labels.get(k, ""), k)):
            if key in self.labels:
                lines.append(f"# {self.labels[key]}")
            lines.append(f"key={key} count={self.records[key]}")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path
