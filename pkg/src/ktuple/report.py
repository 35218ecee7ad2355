"""Run configuration, result bundles and their canonical serializations."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .errors import ContractError

OUTPUT_FORMATS = ("json", "csv", "table")


def default_cache_dir() -> Path:
    env = os.environ.get("KTUPLE_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "ktuple"


@dataclass(frozen=True)
class RunConfig:
    cache_dir: Path = field(default_factory=default_cache_dir)
    memory_budget: int = 2 << 30
    thread_count: int = 1
    output: str = "json"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "cache_dir", Path(self.cache_dir))
        if self.output not in OUTPUT_FORMATS:
            raise ContractError(f"unknown output format {self.output!r}")
        if self.thread_count < 1:
            raise ContractError("thread_count must be >= 1")


def canonical(value: Any) -> Any:
    """Convert to plain JSON types with floats rounded to 15 significant digits.

    Fractions become "p/q" strings, tuples become lists, non-finite floats None.
    """
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return int(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        r = float(f"{value:.15g}")
        return r if math.isfinite(r) else value  # rounding up past the largest double
    if isinstance(value, complex):
        return [canonical(value.real), canonical(value.imag)]
    if isinstance(value, dict):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    if hasattr(value, "item"):  # numpy scalars
        return canonical(value.item())
    if hasattr(value, "__float__"):
        return canonical(float(value))
    raise ContractError(f"cannot serialize {type(value).__name__}")


def provenance() -> dict:
    import mpmath
    import numpy
    import scipy

    return {
        "ktuple": __version__,
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "mpmath": mpmath.__version__,
    }


@dataclass
class ResultEntry:
    name: str
    module: str
    operation: str
    params: dict = field(default_factory=dict)
    value: Any = None
    passed: bool | None = None
    error: str | None = None

    def __post_init__(self):
        self.params = canonical(self.params)
        self.value = canonical(self.value)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "module": self.module,
            "operation": self.operation,
            "params": self.params,
            "value": self.value,
            "passed": self.passed,
            "error": self.error,
        }


@dataclass
class ReportBundle:
    entries: list[ResultEntry] = field(default_factory=list)
    versions: dict = field(default_factory=dict)
    # wall-clock seconds per entry; kept out of serialization so output stays byte-stable
    timings: dict = field(default_factory=dict)

    def add(self, entry: ResultEntry) -> None:
        self.entries.append(entry)

    @property
    def all_passed(self) -> bool:
        return all(e.passed is not False for e in self.entries)

    def failures(self) -> list[str]:
        return [e.name for e in self.entries if e.passed is False]

    def __eq__(self, other) -> bool:
        return isinstance(other, ReportBundle) and [e.as_dict() for e in self.entries] == [
            e.as_dict() for e in other.entries
        ] and self.versions == other.versions


CSV_FIELDS = ["name", "module", "operation", "passed", "error", "params", "value"]


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def emit(bundle: ReportBundle, fmt: str = "json") -> bytes:
    """Serialize a bundle.  An empty bundle gives "[]" or a header-only CSV."""
    if fmt == "json":
        if not bundle.entries:
            return b"[]"
        items = [e.as_dict() for e in bundle.entries]
        if bundle.versions:
            items = [dict(item, versions=bundle.versions) for item in items]
        return json.dumps(items, sort_keys=True, indent=1, allow_nan=False).encode()
    if fmt == "csv":
        buf = io.StringIO()
        fields = CSV_FIELDS + (["versions"] if bundle.versions else [])
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", quoting=csv.QUOTE_ALL)
        w.writeheader()
        for e in bundle.entries:
            d = e.as_dict()
            for key in ("name", "module", "operation", "error"):
                if d[key] and "\x00" in d[key]:
                    raise ContractError(f"CSV cannot carry a NUL character in {key!r}")
            row = {
                "name": d["name"],
                "module": d["module"],
                "operation": d["operation"],
                "passed": "" if d["passed"] is None else str(d["passed"]).lower(),
                "error": d["error"] or "",
                "params": _dumps(d["params"]),
                "value": _dumps(d["value"]),
            }
            if bundle.versions:
                row["versions"] = _dumps(bundle.versions)
            w.writerow(row)
        return buf.getvalue().encode()
    if fmt == "table":
        lines = []
        for e in bundle.entries:
            status = {True: "PASS", False: "FAIL", None: "----"}[e.passed]
            lines.append(f"{status}  {e.name:<28} {e.module:<13} {_dumps(e.value)[:100]}")
        return ("\n".join(lines) + ("\n" if lines else "")).encode()
    raise ContractError(f"unknown format {fmt!r}")


def parse(data: bytes, fmt: str = "json") -> ReportBundle:
    """Inverse of ``emit`` for the json and csv formats."""
    text = data.decode()
    bundle = ReportBundle()
    if fmt == "json":
        for item in json.loads(text):
            versions = item.pop("versions", None)
            if versions:
                bundle.versions = versions
            bundle.add(ResultEntry(**item))
        return bundle
    if fmt == "csv":
        for row in csv.DictReader(io.StringIO(text, newline="")):
            passed = {"true": True, "false": False, "": None}[row["passed"]]
            if row.get("versions"):
                bundle.versions = json.loads(row["versions"])
            bundle.add(
                ResultEntry(
                    row["name"],
                    row["module"],
                    row["operation"],
                    json.loads(row["params"]),
                    json.loads(row["value"]),
                    passed,
                    row["error"] or None,
                )
            )
        return bundle
    raise ContractError(f"cannot parse format {fmt!r}")


def rows_to_csv(rows: list[dict], fields: list[str] | None = None) -> str:
    if fields is None:
        fields = list(rows[0]) if rows else []
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: canonical(v) for k, v in r.items()})
    return buf.getvalue()
