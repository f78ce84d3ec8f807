"""Workload sizing: translate application demand into requirement quantities.

Batch runtimes assume perfect linear scaling across workers; arithmetic runs
on exact rationals and is only rounded when converting to float at the end,
so doubling the task count exactly doubles the estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadRequestError

SECONDS_PER_HOUR = 3600
SECONDS_PER_YEAR = 365 * 24 * SECONDS_PER_HOUR
KIB_PER_GIB = 1024 * 1024


@dataclass(frozen=True)
class BatchWorkload:
    """A task-parallel job: how many tasks, how long each, on how many workers."""

    task_count: float
    per_task_time: float  # seconds
    vm_count: int = 1
    threads_per_vm: int = 1

    def __post_init__(self):
        for name in ("task_count", "per_task_time", "vm_count", "threads_per_vm"):
            if getattr(self, name) <= 0:
                raise BadRequestError(f"{name} must be positive", parameter=name)


@dataclass(frozen=True)
class TrafficWorkload:
    """Monthly site traffic: visitors times pages times page size."""

    monthly_visitors: float
    page_size_kib: float
    pages_per_visitor: float = 1.0

    def __post_init__(self):
        for name in ("monthly_visitors", "page_size_kib", "pages_per_visitor"):
            if getattr(self, name) < 0:
                raise BadRequestError(f"{name} must be >= 0", parameter=name)


def _serial_seconds(w: BatchWorkload) -> Fraction:
    return Fraction(w.task_count) * Fraction(w.per_task_time)


def estimate_batch_runtime(w: BatchWorkload) -> float:
    """Wall-clock hours with vm_count x threads_per_vm workers in parallel."""
    workers = w.vm_count * w.threads_per_vm
    if workers <= 0:
        raise BadRequestError("zero parallelism", parameter="vm_count")
    hours = _serial_seconds(w) / workers / SECONDS_PER_HOUR
    return float(hours)


def estimate_serial_years(w: BatchWorkload) -> float:
    """Years of processing on a single worker, ignoring parallelism fields."""
    return float(_serial_seconds(w) / SECONDS_PER_YEAR)


def required_parallelism(w: BatchWorkload, deadline_hours: float) -> int:
    """Minimum worker count that finishes within the deadline."""
    if deadline_hours <= 0:
        raise BadRequestError("deadline must be positive", parameter="deadline")
    ratio = _serial_seconds(w) / (Fraction(deadline_hours) * SECONDS_PER_HOUR)
    return max(1, math.ceil(ratio))


def estimate_monthly_traffic(w: TrafficWorkload) -> float:
    """Monthly download volume in binary GB (KiB totals divided by 1024^2)."""
    return w.monthly_visitors * w.pages_per_visitor * w.page_size_kib / KIB_PER_GIB
