"""Append-only selection history and the popularity counts derived from it.

Each record is one newline-delimited JSON object, so the on-disk log can be
replayed from any prefix and the counts are a pure fold over it. Appends are
serialized through a lock; duplicate records (same session, bundle, event,
timestamp) are ignored to make retries safe. ``compact`` rolls the counted
log into a snapshot file and truncates the log.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BadRequestError

EVENTS = ("recommended", "selected")


@dataclass(frozen=True)
class SelectionRecord:
    timestamp: str
    session: str
    compute_id: str
    storage_id: str
    transfer_id: str
    event: str

    def __post_init__(self):
        if self.event not in EVENTS:
            raise BadRequestError(
                f"event must be one of {', '.join(EVENTS)}, got '{self.event}'",
                parameter="event",
            )

    @property
    def offer_ids(self) -> tuple[str, ...]:
        return tuple(i for i in (self.compute_id, self.storage_id, self.transfer_id) if i)

    @property
    def dedupe_key(self) -> tuple:
        return (
            self.session,
            self.compute_id,
            self.storage_id,
            self.transfer_id,
            self.event,
            self.timestamp,
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "timestamp": self.timestamp,
                "session": self.session,
                "compute_id": self.compute_id,
                "storage_id": self.storage_id,
                "transfer_id": self.transfer_id,
                "event": self.event,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "SelectionRecord":
        raw = json.loads(line)
        return cls(
            timestamp=raw["timestamp"],
            session=raw["session"],
            compute_id=raw.get("compute_id", ""),
            storage_id=raw.get("storage_id", ""),
            transfer_id=raw.get("transfer_id", ""),
            event=raw["event"],
        )


@dataclass
class PopularityStats:
    """Per-offer counts: (times recommended, times selected)."""

    counts: dict[str, tuple[int, int]] = field(default_factory=dict)

    def recommended(self, offer_id: str) -> int:
        return self.counts.get(offer_id, (0, 0))[0]

    def selected(self, offer_id: str) -> int:
        return self.counts.get(offer_id, (0, 0))[1]

    def score(self, offer_id: str, recommended_weight: float = 0.1) -> float:
        rec, sel = self.counts.get(offer_id, (0, 0))
        return sel + recommended_weight * rec


def fold_records(records, base: dict[str, tuple[int, int]] | None = None) -> PopularityStats:
    """Pure fold of selection records into popularity counts."""
    counts: dict[str, tuple[int, int]] = dict(base or {})
    for record in records:
        for offer_id in record.offer_ids:
            rec, sel = counts.get(offer_id, (0, 0))
            if record.event == "recommended":
                rec += 1
            else:
                sel += 1
            counts[offer_id] = (rec, sel)
    return PopularityStats(counts=counts)


class HistoryStore:
    """Durable selection log with in-memory counters kept in lockstep."""

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.Lock()
        self._path = Path(path) if path else None
        self._records: list[SelectionRecord] = []
        self._seen: set[tuple] = set()
        self._base_counts: dict[str, tuple[int, int]] = {}
        if self._path is not None:
            self._load()

    @property
    def snapshot_path(self) -> Path | None:
        if self._path is None:
            return None
        return self._path.with_suffix(self._path.suffix + ".snapshot")

    def _load(self) -> None:
        snap = self.snapshot_path
        if snap is not None and snap.exists():
            raw = json.loads(snap.read_text(encoding="utf-8"))
            self._base_counts = {
                offer: (int(rec), int(sel)) for offer, (rec, sel) in raw["counts"].items()
            }
        if self._path.exists():
            for line in self._path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                record = SelectionRecord.from_json(line)
                if record.dedupe_key in self._seen:
                    continue
                self._seen.add(record.dedupe_key)
                self._records.append(record)

    def append(self, record: SelectionRecord) -> bool:
        """Store one record; returns False when it was a duplicate replay."""
        with self._lock:
            if record.dedupe_key in self._seen:
                return False
            self._seen.add(record.dedupe_key)
            self._records.append(record)
            if self._path is not None:
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(record.to_json() + "\n")
        return True

    def stats(self, offer_ids=None) -> PopularityStats:
        with self._lock:
            stats = fold_records(self._records, base=self._base_counts)
        if offer_ids is None:
            return stats
        wanted = set(offer_ids)
        return PopularityStats(
            counts={offer: pair for offer, pair in stats.counts.items() if offer in wanted}
        )

    def records(self) -> list[SelectionRecord]:
        with self._lock:
            return list(self._records)

    def compact(self) -> None:
        """Fold the live log into the snapshot file and truncate the log."""
        if self._path is None:
            return
        with self._lock:
            stats = fold_records(self._records, base=self._base_counts)
            self.snapshot_path.write_text(
                json.dumps({"counts": {k: list(v) for k, v in stats.counts.items()}}),
                encoding="utf-8",
            )
            self._path.write_text("", encoding="utf-8")
            self._base_counts = stats.counts
            self._records = []
            self._seen = set()
