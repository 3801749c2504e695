"""JSON-lines store of solved instances.

One record per line::

    {"n": 6, "k": 3, "quantity": "msum", "value_doubled": 1,
     "witness": [6, 1, 4, 5, 2, 3], "nodes": 15, "schema_version": 1}

Records are re-verified (witness re-evaluated) when loaded; entries that fail
are reported through ``problems`` and never used.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .bounds import Quantity
from .halfint import HalfInt
from .perm import Permutation, disc_of, msum_of

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ENV_VAR = "KSUM_CACHE"
DEFAULT_PATH = ".ksum-cache.jsonl"


@dataclass(frozen=True)
class CacheRecord:
    n: int
    k: int
    quantity: Quantity
    value: HalfInt
    witness: Permutation
    nodes: int
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "quantity": self.quantity.value,
            "value_doubled": self.value.doubled,
            "witness": list(self.witness.entries),
            "nodes": self.nodes,
            "schema_version": self.schema_version,
        }

    @classmethod
    def from_json(cls, obj: dict) -> CacheRecord:
        return cls(
            n=int(obj["n"]),
            k=int(obj["k"]),
            quantity=Quantity(obj["quantity"]),
            value=HalfInt(int(obj["value_doubled"])),
            witness=Permutation(obj["witness"]),
            nodes=int(obj["nodes"]),
            schema_version=int(obj["schema_version"]),
        )


def verify(rec: CacheRecord) -> Optional[str]:
    """None if the record checks out, otherwise the reason it does not."""
    if rec.schema_version != SCHEMA_VERSION:
        return f"schema_version {rec.schema_version} != {SCHEMA_VERSION}"
    if rec.witness.n != rec.n:
        return f"witness has length {rec.witness.n}, expected {rec.n}"
    if not 1 <= rec.k < rec.n:
        return f"bad window length k={rec.k}"
    evaluate = msum_of if rec.quantity is Quantity.MSUM else disc_of
    got = evaluate(rec.witness, rec.k)
    if got != rec.value:
        return f"witness evaluates to {got}, record claims {rec.value}"
    return None


def default_path() -> Path:
    return Path(os.environ.get(ENV_VAR, DEFAULT_PATH))


class ResultCache:
    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self.records: dict[tuple[int, int, Quantity], CacheRecord] = {}
        self.problems: list[str] = []
        self.load()

    def load(self) -> None:
        self.records.clear()
        self.problems.clear()
        if not self.path.exists():
            return
        with self.path.open(encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = CacheRecord.from_json(json.loads(line))
                except (ValueError, KeyError, TypeError) as exc:
                    self._problem(f"{self.path}:{line_no}: unreadable record: {exc}")
                    continue
                reason = verify(rec)
                if reason is not None:
                    self._problem(f"{self.path}:{line_no}: {rec.quantity.value}({rec.n},{rec.k}) rejected: {reason}")
                    continue
                self.records[(rec.n, rec.k, rec.quantity)] = rec

    def _problem(self, msg: str) -> None:
        log.warning(msg)
        self.problems.append(msg)

    def lookup(self, n: int, k: int, quantity: Quantity | str) -> Optional[CacheRecord]:
        return self.records.get((n, k, Quantity(quantity)))

    def store(self, outcome) -> CacheRecord:
        """Append an Exact SearchOutcome."""
        rec = CacheRecord(outcome.n, outcome.k, outcome.quantity, outcome.value, outcome.witness, outcome.nodes_visited)
        reason = verify(rec)
        if reason is not None:
            raise ValueError(f"refusing to cache unverifiable record: {reason}")
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec.to_json()) + "\n")
        self.records[(rec.n, rec.k, rec.quantity)] = rec
        return rec

    def certificates(self) -> dict[tuple[int, int, str], HalfInt]:
        """Cached exact values, keyed for ``bounds.bound_report(certificates=...)``."""
        return {(n, k, q.value): r.value for (n, k, q), r in self.records.items()}
