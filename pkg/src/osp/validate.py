"""Feasibility checks for instances and schedules.

Violations are collected exhaustively; a report is feasible iff it is empty.
Tardiness is never a violation.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from .core import Batch, Instance, Schedule

log = logging.getLogger(__name__)


class Code(str, enum.Enum):
    RELEASE = "RELEASE"
    PROC_WINDOW = "PROC_WINDOW"
    OVERLAP = "OVERLAP"
    INTERVAL_FIT = "INTERVAL_FIT"
    SETUP_FIT = "SETUP_FIT"
    CAPACITY = "CAPACITY"
    ATTRIBUTE = "ATTRIBUTE"
    ELIGIBILITY = "ELIGIBILITY"
    STRUCTURE = "STRUCTURE"


@dataclass(frozen=True)
class Violation:
    code: Code
    ref: str
    detail: str


@dataclass(frozen=True)
class ViolationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> set[Code]:
        return {v.code for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "violations": [
                {"code": v.code.value, "ref": v.ref, "detail": v.detail} for v in self.violations
            ],
        }


def _matrix_ok(mat, a: int) -> bool:
    return len(mat) == a and all(
        len(row) == a and all(isinstance(v, int) and v >= 0 for v in row) for row in mat
    )


def validate_instance(instance: Instance) -> ViolationReport:
    out: list[Violation] = []

    def bad(ref: str, detail: str):
        out.append(Violation(Code.STRUCTURE, ref, detail))

    l, a = instance.horizon, instance.attribute_count
    if l < 1:
        bad("instance", f"horizon {l} < 1")
    if a < 1:
        bad("instance", f"attribute count {a} < 1")
    for name, mat in (("setup_times", instance.setup_times), ("setup_costs", instance.setup_costs)):
        if not _matrix_ok(mat, a):
            bad(name, f"{name} must be a {a}x{a} matrix of non-negative integers")
    if not instance.machines:
        bad("instance", "no machines")
    if not instance.jobs:
        bad("instance", "no jobs")

    for i, m in enumerate(instance.machines, 1):
        ref = f"machine {m.id}"
        if m.id != i:
            bad(ref, f"machine ids must be contiguous from 1 (expected {i})")
        if m.capacity < 1:
            bad(ref, f"capacity {m.capacity} < 1")
        if not 1 <= m.initial_state <= a:
            bad(ref, f"initial state {m.initial_state} outside [1,{a}]")
        prev_end = 0
        for s, e in m.availability:
            if not 0 <= s <= e <= l:
                bad(ref, f"interval [{s},{e}] not within [0,{l}]")
            if s < prev_end:
                bad(ref, f"interval [{s},{e}] overlaps or is unsorted")
            prev_end = max(prev_end, e)

    k = len(instance.machines)
    for i, j in enumerate(instance.jobs, 1):
        ref = f"job {j.id}"
        if j.id != i:
            bad(ref, f"job ids must be contiguous from 1 (expected {i})")
        if not j.eligible:
            bad(ref, "empty eligible set")
        elif not all(1 <= m <= k for m in j.eligible):
            bad(ref, f"eligible machines {sorted(j.eligible)} outside [1,{k}]")
        if not 0 <= j.et < l:
            bad(ref, f"release {j.et} outside [0,{l})")
        if j.lt is not None:
            if j.lt <= j.et:
                bad(ref, f"due date {j.lt} not after release {j.et}")
            elif j.lt > l:
                log.warning("job %d: due date %d beyond horizon %d", j.id, j.lt, l)
        if not 0 < j.mint <= j.maxt:
            bad(ref, f"processing window [{j.mint},{j.maxt}] invalid")
        if j.size < 1:
            bad(ref, f"size {j.size} < 1")
        if not 1 <= j.attr <= a:
            bad(ref, f"attribute {j.attr} outside [1,{a}]")
    return ViolationReport(tuple(out))


def _fits(intervals, lead_start: int, end: int) -> bool:
    return any(s <= lead_start and end <= e for s, e in intervals)


def validate_schedule(instance: Instance, schedule: Schedule) -> ViolationReport:
    out: list[Violation] = []
    n, k, l = instance.n, instance.k, instance.horizon

    counts: dict[int, int] = {}
    usable: list[Batch] = []
    for idx, b in enumerate(schedule.batches):
        ref = f"batch {idx}"
        ok = True
        if not b.jobs:
            out.append(Violation(Code.STRUCTURE, ref, "empty batch"))
            ok = False
        if not 1 <= b.machine <= k:
            out.append(Violation(Code.STRUCTURE, ref, f"unknown machine {b.machine}"))
            ok = False
        if not 0 <= b.start <= l or b.proc < 1:
            out.append(Violation(Code.STRUCTURE, ref, f"start {b.start} / proc {b.proc} out of range"))
        for j in b.jobs:
            if 1 <= j <= n:
                counts[j] = counts.get(j, 0) + 1
            else:
                out.append(Violation(Code.STRUCTURE, ref, f"unknown job {j}"))
                ok = False
        if ok:
            usable.append(b)
    for j in range(1, n + 1):
        c = counts.get(j, 0)
        if c != 1:
            out.append(Violation(Code.STRUCTURE, f"job {j}", f"appears {c} times"))

    for b in usable:
        ref = f"machine {b.machine} start {b.start}"
        members = [instance.job(j) for j in b.jobs]
        for job in members:
            if b.start < job.et:
                out.append(Violation(Code.RELEASE, ref, f"job {job.id} released at {job.et}"))
            if b.machine not in job.eligible:
                out.append(Violation(Code.ELIGIBILITY, ref, f"job {job.id} not eligible"))
        lo = max(job.mint for job in members)
        hi = min(job.maxt for job in members)
        if not lo <= b.proc <= hi:
            out.append(Violation(Code.PROC_WINDOW, ref, f"proc {b.proc} outside [{lo},{hi}]"))
        size = sum(job.size for job in members)
        cap = instance.machine(b.machine).capacity
        if size > cap:
            out.append(Violation(Code.CAPACITY, ref, f"size {size} > capacity {cap}"))
        attrs = {job.attr for job in members}
        if len(attrs) > 1:
            out.append(Violation(Code.ATTRIBUTE, ref, f"mixed attributes {sorted(attrs)}"))

    by_machine: dict[int, list[Batch]] = {}
    for b in usable:
        by_machine.setdefault(b.machine, []).append(b)
    for m, seq in sorted(by_machine.items()):
        seq.sort(key=lambda b: (b.start, b.proc, b.jobs))
        mach = instance.machine(m)
        prev_attr = mach.initial_state
        prev: Batch | None = None
        for b in seq:
            ref = f"machine {m} start {b.start}"
            attr = instance.job(b.jobs[0]).attr
            setup = instance.st(prev_attr, attr)
            if prev is not None and b.start < prev.end + setup:
                out.append(
                    Violation(
                        Code.OVERLAP,
                        ref,
                        f"starts at {b.start} before {prev.end} + setup {setup}",
                    )
                )
            if not _fits(mach.availability, b.start, b.end):
                out.append(Violation(Code.INTERVAL_FIT, ref, f"[{b.start},{b.end}] fits no interval"))
            elif not _fits(mach.availability, b.start - setup, b.end):
                out.append(
                    Violation(Code.SETUP_FIT, ref, f"setup {setup} before {b.start} leaves its interval")
                )
            prev_attr, prev = attr, b
    return ViolationReport(tuple(out))
