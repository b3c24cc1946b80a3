"""Corpus manifest records and JSON-Lines persistence.

Every record keeps the full key set in a fixed order (absent values are
null) so manifest files are byte-stable across runs and worker counts.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

from relicforge.analysis.metrics import MetricsRecord


class Status(enum.Enum):
    KEPT = "Kept"
    REPAIRED = "Repaired"
    DUPLICATE = "Duplicate"
    TRIVIAL = "Trivial"
    REJECTED = "Rejected"


class Split(enum.Enum):
    TRAIN = "Train"
    TEST = "Test"


@dataclass
class Record:
    id: str
    relative_path: str
    md5: str
    lines: int
    status: Status | None = None
    duplicate_of: str | None = None
    reason: str | None = None
    metrics: MetricsRecord | None = None
    split: Split | None = None
    fold: int | None = None
    oracle_java: str | None = None
    oracle_labels: str | None = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "relative_path": self.relative_path,
            "md5": self.md5,
            "lines": self.lines,
            "status": self.status.value if self.status else None,
            "duplicate_of": self.duplicate_of,
            "reason": self.reason,
            "metrics": self.metrics.to_json() if self.metrics else None,
            "split": self.split.value if self.split else None,
            "fold": self.fold,
            "oracle_java": self.oracle_java,
            "oracle_labels": self.oracle_labels,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Record":
        return cls(
            id=data["id"],
            relative_path=data["relative_path"],
            md5=data["md5"],
            lines=data["lines"],
            status=Status(data["status"]) if data.get("status") else None,
            duplicate_of=data.get("duplicate_of"),
            reason=data.get("reason"),
            metrics=MetricsRecord.from_json(data["metrics"]) if data.get("metrics") else None,
            split=Split(data["split"]) if data.get("split") else None,
            fold=data.get("fold"),
            oracle_java=data.get("oracle_java"),
            oracle_labels=data.get("oracle_labels"),
        )


@dataclass
class CorpusManifest:
    records: list[Record] = field(default_factory=list)

    def by_id(self) -> dict[str, Record]:
        return {r.id: r for r in self.records}

    def eligible(self) -> list[Record]:
        """Records that survived curation and may be split/trained on."""
        return [r for r in self.records if r.status in (Status.KEPT, Status.REPAIRED)]

    def counts(self) -> dict[str, int]:
        tally = {"clean": 0, "repaired": 0, "rejected": 0, "duplicate": 0, "trivial": 0}
        names = {
            Status.KEPT: "clean",
            Status.REPAIRED: "repaired",
            Status.REJECTED: "rejected",
            Status.DUPLICATE: "duplicate",
            Status.TRIVIAL: "trivial",
        }
        for r in self.records:
            if r.status is not None:
                tally[names[r.status]] += 1
        return tally

    def write_jsonl(self, path: Path | str) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for record in self.records:
                fh.write(json.dumps(record.to_json(), separators=(",", ":")) + "\n")

    @classmethod
    def read_jsonl(cls, path: Path | str) -> "CorpusManifest":
        records = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(Record.from_json(json.loads(line)))
        return cls(records)

MANIFEST_NAME = "corpus.manifest.jsonl"
