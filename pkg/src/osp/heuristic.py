"""Dispatching-rule construction heuristic.

A time sweep opens one batch at a time: the released job with the earliest
due date (largest size on ties) seeds a batch on the fitting machine with the
cheapest setup, compatible released jobs are added by decreasing due date,
then compatible future jobs are pulled in while the batch still fits its
availability interval. Batches always run for the largest minimal time of
their members.
"""

from __future__ import annotations

import math
from typing import Optional

from .core import Batch, Instance, Job, Schedule
from .errors import Unschedulable

INF = math.inf


def _due(job: Job) -> float:
    return INF if job.lt is None else job.lt


def _current_interval(machine, t: int) -> Optional[tuple[int, int]]:
    for s, e in machine.availability:
        if s <= t < e:
            return s, e
    return None


class _Sweep:
    def __init__(self, instance: Instance):
        self.inst = instance
        self.free_at = {m.id: 0 for m in instance.machines}
        self.last_attr = {m.id: m.initial_state for m in instance.machines}
        self.pending = {j.id: j for j in instance.jobs}
        self.batches: list[Batch] = []

    def start_on(self, m: int, job: Job, t: int, interval: tuple[int, int]) -> Optional[int]:
        """Start of ``job`` alone on ``m`` at sweep time ``t``, or None if it misses the interval."""
        s, e = interval
        setup = self.inst.st(self.last_attr[m], job.attr)
        start = max(t, job.et, max(s, self.free_at[m]) + setup)
        if start + job.mint > e or job.size > self.inst.machine(m).capacity:
            return None
        return start

    def open_batch(self, t: int) -> bool:
        inst = self.inst
        available = {}
        for mach in inst.machines:
            if self.free_at[mach.id] <= t:
                iv = _current_interval(mach, t)
                if iv is not None:
                    available[mach.id] = iv
        if not available:
            return False

        best = None
        for job in self.pending.values():
            if job.et > t:
                continue
            options = []
            for m in sorted(job.eligible & available.keys()):
                start = self.start_on(m, job, t, available[m])
                if start is not None:
                    options.append((inst.st(self.last_attr[m], job.attr), m, start))
            if not options:
                continue
            key = (_due(job), -job.size, job.id)
            if best is None or key < best[0]:
                best = (key, job, min(options))
        if best is None:
            return False

        _, seed, (_, m, start) = best
        cap = inst.machine(m).capacity
        ae = available[m][1]
        members = [seed]
        lo, hi, size, proc = seed.mint, seed.maxt, seed.size, seed.mint
        del self.pending[seed.id]

        def seed_late(s: int, p: int) -> bool:
            return seed.lt is not None and s + p > seed.lt

        def admit(job: Job) -> Optional[tuple[int, int]]:
            if job.attr != seed.attr or m not in job.eligible or size + job.size > cap:
                return None
            if max(lo, job.mint) > min(hi, job.maxt):
                return None
            s, p = max(start, job.et), max(proc, job.mint)
            if s + p > ae:
                return None
            if not seed_late(start, proc) and seed_late(s, p):
                return None
            return s, p

        order = sorted(self.pending.values(), key=lambda j: (-_due(j), j.id))
        for lookahead in (False, True):
            if lookahead and size >= cap:
                break
            for job in order:
                if job.id not in self.pending or (job.et > t) != lookahead:
                    continue
                fit = admit(job)
                if fit is None:
                    continue
                start, proc = fit
                members.append(job)
                lo, hi, size = max(lo, job.mint), min(hi, job.maxt), size + job.size
                del self.pending[job.id]

        self.batches.append(Batch(m, start, proc, tuple(j.id for j in members)))
        self.free_at[m] = start + proc
        self.last_attr[m] = seed.attr
        return True

    def next_event(self, t: int) -> Optional[int]:
        times = [j.et for j in self.pending.values() if j.et > t]
        times += [f for f in self.free_at.values() if f > t]
        times += [s for mach in self.inst.machines for s, _ in mach.availability if s > t]
        return min(times) if times else None

    def run(self) -> Schedule:
        t: Optional[int] = 0
        while self.pending and t is not None and t <= self.inst.horizon:
            while self.pending and self.open_batch(t):
                pass
            t = self.next_event(t)
        schedule = Schedule(tuple(self.batches))
        if self.pending:
            raise Unschedulable(min(self.pending), schedule)
        return schedule


def construct(instance: Instance) -> Schedule:
    """Build a feasible schedule; raises :class:`Unschedulable` with the partial
    schedule attached when some job cannot be placed."""
    return _Sweep(instance).run()
