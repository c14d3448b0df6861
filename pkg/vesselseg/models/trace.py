from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .enums import TerminationReason


@dataclass(frozen=True)
class DecisionParams:
    mean_coherence: float
    M: float
    M_p: float
    M_n: float
    alpha: float
    beta: float
    max_p: tuple[int, int]
    max_g: float


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    active_count: int
    next_active_count: int
    params: DecisionParams
    lambda_thresh: float | None
    wall_time_s: float

    def to_payload(self) -> dict[str, object]:
        return {
            "iter": self.iteration,
            "active_count": self.active_count,
            "alpha": self.params.alpha,
            "beta": self.params.beta,
            "M": self.params.M,
            "mean_coherence": self.params.mean_coherence,
            "lambda": self.lambda_thresh,
            "max_p_row": self.params.max_p[0],
            "max_p_col": self.params.max_p[1],
        }


@dataclass
class IterationTrace:
    records: list[IterationRecord] = field(default_factory=list)
    reason: TerminationReason | None = None

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def active_counts(self) -> list[int]:
        return [record.active_count for record in self.records]

    @property
    def wall_time_s(self) -> float:
        return sum(record.wall_time_s for record in self.records)

    def append(self, record: IterationRecord) -> None:
        if self.records and record.active_count > self.records[-1].active_count:
            raise AssertionError("active set grew between iterations")
        self.records.append(record)

    def to_json_lines(self) -> str:
        """One JSON object per iteration; the last carries ``reason``. Wall time is omitted."""
        reason = self.reason.value if self.reason else None
        if not self.records:
            payload: dict[str, object] = {
                "iter": 0,
                "active_count": 0,
                "alpha": None,
                "beta": None,
                "M": None,
                "mean_coherence": None,
                "lambda": None,
                "max_p_row": None,
                "max_p_col": None,
                "reason": reason,
            }
            return json.dumps(payload, separators=(",", ":")) + "\n"

        lines = []
        for index, record in enumerate(self.records):
            payload = record.to_payload()
            if index == len(self.records) - 1:
                payload["reason"] = reason
            lines.append(json.dumps(payload, separators=(",", ":")))
        return "\n".join(lines) + "\n"

    def write(self, path: Path) -> None:
        path.write_text(self.to_json_lines(), encoding="utf-8")
