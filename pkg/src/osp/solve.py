"""Exact solvers.

Two dominance rules make a schedule fully determined by its batching
(which jobs form which batch, on which machine, in which order): every
batch runs for the largest minimal time of its members, and every batch
starts as early as the batches before it allow. Both solvers therefore
search over batchings only and time them with :func:`schedule_fixed`.
"""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from . import bounds
from .core import (
    DEFAULT_WEIGHTS,
    Batch,
    Instance,
    Job,
    Normalizer,
    ObjectiveReport,
    ObjectiveWeights,
    Schedule,
    objective,
    objective_components,
)
from .errors import DoesNotFit, OSPError, TooLarge
from .validate import validate_schedule

BRUTE_FORCE_LIMIT = 10
DEFAULT_TIME_LIMIT = 3600.0


class Status(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class SolveResult:
    schedule: Optional[Schedule]
    obj: Optional[ObjectiveReport]
    status: Status
    lower_bound: Fraction
    nodes: int
    elapsed: float
    optima: tuple[Schedule, ...] = field(default=(), compare=False)


def earliest_start(
    intervals: Sequence[tuple[int, int]], ready: int, setup: int, release: int, proc: int
) -> Optional[int]:
    """Smallest start ``S >= release`` whose setup begins after ``ready`` and whose
    setup and processing fit one interval."""
    for s, e in intervals:
        start = max(release, max(s, ready) + setup)
        if start + proc <= e:
            return start
    return None


def schedule_fixed(instance: Instance, batching: Mapping[int, Sequence[Sequence[int]]]) -> Schedule:
    """Time a batching given as machine -> ordered list of job groups."""
    out: list[Batch] = []
    for m in sorted(batching):
        mach = instance.machine(m)
        prev_attr, ready = mach.initial_state, 0
        for group in batching[m]:
            members = [instance.job(j) for j in group]
            attr = members[0].attr
            proc = max(j.mint for j in members)
            start = earliest_start(
                mach.availability,
                ready,
                instance.st(prev_attr, attr),
                max(j.et for j in members),
                proc,
            )
            if start is None:
                raise DoesNotFit(f"batch {sorted(group)} does not fit on machine {m}")
            out.append(Batch(m, start, proc, tuple(group)))
            prev_attr, ready = attr, start + proc
    return Schedule(tuple(out))


# ---------------------------------------------------------------------------
# brute force


@dataclass(frozen=True)
class _Block:
    jobs: tuple[int, ...]
    attr: int
    proc: int
    release: int
    machines: tuple[int, ...]
    due: tuple[int, ...]  # due dates of members that have one


def _block(instance: Instance, jobs: Sequence[Job]) -> Optional[_Block]:
    lo = max(j.mint for j in jobs)
    hi = min(j.maxt for j in jobs)
    if lo > hi or len({j.attr for j in jobs}) > 1:
        return None
    size = sum(j.size for j in jobs)
    common = frozenset.intersection(*(j.eligible for j in jobs))
    machines = tuple(m for m in sorted(common) if instance.machine(m).capacity >= size)
    if not machines:
        return None
    return _Block(
        tuple(j.id for j in jobs),
        jobs[0].attr,
        lo,
        max(j.et for j in jobs),
        machines,
        tuple(j.lt for j in jobs if j.lt is not None),
    )


def _partitions(instance: Instance):
    """All partitions of the jobs into batchable groups."""
    jobs = instance.jobs
    groups: list[list[Job]] = []

    def rec(i: int):
        if i == len(jobs):
            yield [list(g) for g in groups]
            return
        job = jobs[i]
        for g in groups:
            g.append(job)
            if _block(instance, g) is not None:
                yield from rec(i + 1)
            g.pop()
        groups.append([job])
        if _block(instance, groups[-1]) is not None:
            yield from rec(i + 1)
        groups.pop()

    yield from rec(0)


class _MachineOracle:
    """Best order of a fixed set of blocks on one machine, by exhaustive search."""

    def __init__(self, instance: Instance, norm: Normalizer):
        self.instance = instance
        self.norm = norm
        self.memo: dict = {}

    def best(self, m: int, blocks: tuple[_Block, ...]):
        key = (m, frozenset(b.jobs for b in blocks))
        if key not in self.memo:
            self.memo[key] = self._search(m, sorted(blocks, key=lambda b: b.jobs))
        return self.memo[key]

    def _search(self, m: int, blocks: list[_Block]):
        inst, norm = self.instance, self.norm
        mach = inst.machine(m)
        best = [None, None]  # cost, order
        order: list[_Block] = []
        used = [False] * len(blocks)

        def rec(prev_attr: int, ready: int, cost: int):
            if len(order) == len(blocks):
                if best[0] is None or cost < best[0]:
                    best[0], best[1] = cost, tuple(order)
                return
            for i, b in enumerate(blocks):
                if used[i]:
                    continue
                start = earliest_start(
                    mach.availability, ready, inst.st(prev_attr, b.attr), b.release, b.proc
                )
                if start is None:
                    continue
                end = start + b.proc
                late = sum(1 for d in b.due if end > d)
                used[i] = True
                order.append(b)
                rec(b.attr, end, cost + norm.coef_sc * inst.sc(prev_attr, b.attr) + norm.coef_t * late)
                order.pop()
                used[i] = False

        rec(mach.initial_state, 0, 0)
        return best[0], best[1]


def brute_force(
    instance: Instance, weights: ObjectiveWeights = DEFAULT_WEIGHTS, all_optima: bool = False
) -> SolveResult:
    """Exhaustive optimum over every batching (partition, machines, orders).

    Per-machine orders are optimised independently for each machine since the
    objective splits into a processing-time term fixed by the partition and a
    per-machine setup/tardiness term. With ``all_optima`` every minimising
    partition/assignment is returned in ``SolveResult.optima``.
    """
    if instance.n > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"brute force limited to {BRUTE_FORCE_LIMIT} jobs, got {instance.n}")
    t0 = time.perf_counter()
    norm = Normalizer.of(instance, weights)
    oracle = _MachineOracle(instance, norm)
    best_cost = None
    winners: list[dict[int, tuple[_Block, ...]]] = []
    nodes = 0
    for groups in _partitions(instance):
        blocks = [_block(instance, g) for g in groups]
        base = norm.coef_p * sum(b.proc for b in blocks)
        if best_cost is not None and base > best_cost:
            continue
        for assign in itertools.product(*(b.machines for b in blocks)):
            nodes += 1
            per: dict[int, list[_Block]] = {}
            for b, m in zip(blocks, assign):
                per.setdefault(m, []).append(b)
            cost = base
            orders: dict[int, tuple[_Block, ...]] = {}
            for m, bl in per.items():
                c, order = oracle.best(m, tuple(bl))
                if c is None:
                    cost = None
                    break
                cost += c
                orders[m] = order
            if cost is None:
                continue
            if best_cost is None or cost < best_cost:
                best_cost, winners = cost, [orders]
            elif cost == best_cost and all_optima:
                winners.append(orders)

    elapsed = time.perf_counter() - t0
    if best_cost is None:
        return SolveResult(None, None, Status.INFEASIBLE, Fraction(0), nodes, elapsed)

    def build(orders):
        return schedule_fixed(instance, {m: [b.jobs for b in seq] for m, seq in orders.items()})

    schedules = tuple(build(o) for o in winners)
    rep = objective(instance, schedules[0], weights)
    assert rep.obj_int == best_cost
    return SolveResult(
        schedules[0],
        rep,
        Status.OPTIMAL,
        rep.obj_real,
        nodes,
        elapsed,
        schedules if all_optima else (),
    )


# ---------------------------------------------------------------------------
# branch and bound


class _Open:
    __slots__ = ("machine", "jobs", "attr", "lo", "hi", "size", "release")

    def __init__(self, machine: int, job: Job):
        self.machine = machine
        self.jobs = [job]
        self.attr = job.attr
        self.lo = job.mint
        self.hi = job.maxt
        self.size = job.size
        self.release = job.et


def _machine_classes(instance: Instance) -> dict[int, Optional[int]]:
    """For each machine, the next lower-id machine it is interchangeable with."""
    prev: dict[int, Optional[int]] = {}
    seen: dict[tuple, int] = {}
    for m in instance.machines:
        sig = (
            m.capacity,
            m.initial_state,
            m.availability,
            tuple(m.id in j.eligible for j in instance.jobs),
        )
        prev[m.id] = seen.get(sig)
        seen[sig] = m.id
    return prev


class _Search:
    def __init__(self, instance: Instance, weights: ObjectiveWeights, deadline: float, node_limit):
        self.inst = instance
        self.norm = Normalizer.of(instance, weights)
        self.deadline = deadline
        self.node_limit = node_limit
        self.nodes = 0
        self.stopped = False
        self.best_cost: Optional[int] = None
        self.best: Optional[Schedule] = None
        self.batches: list[_Open] = []
        self.seqs: dict[int, list[_Open]] = {m.id: [] for m in instance.machines}
        self.late_by_machine: dict[int, int] = {m.id: 0 for m in instance.machines}
        self.twin = _machine_classes(instance)
        self.always_late = bounds.always_tardy(instance)[0]
        self.cap = {m.id: m.capacity for m in instance.machines}
        self.lb_memo: dict = {}
        a = instance.attribute_count
        self.lead = {r: min(instance.st(x, r) for x in range(1, a + 1)) for r in range(1, a + 1)}

    # -- timing -------------------------------------------------------------
    def retime(self, m: int) -> bool:
        """Relaxed timing of machine ``m``: every setup is the cheapest transition
        into the batch attribute. Relaxed starts never exceed the real starts of
        any completion of the current node, so infeasibility and lateness found
        here are final."""
        mach = self.inst.machine(m)
        ready, late = 0, 0
        for b in self.seqs[m]:
            start = earliest_start(mach.availability, ready, self.lead[b.attr], b.release, b.lo)
            if start is None:
                return False
            ready = start + b.lo
            late += sum(1 for j in b.jobs if j.lt is not None and ready > j.lt)
        self.late_by_machine[m] = late
        return True

    # -- bounding -----------------------------------------------------------
    def can_join(self, b: _Open, j: Job) -> bool:
        return (
            b.attr == j.attr
            and b.machine in j.eligible
            and b.size + j.size <= self.cap[b.machine]
            and max(b.lo, j.mint) <= min(b.hi, j.maxt)
        )

    def residual_bound(self, residual: tuple[Job, ...]) -> tuple[int, list[int]]:
        key = tuple(j.id for j in residual)
        hit = self.lb_memo.get(key)
        if hit is None:
            p = 0
            counts = []
            for r in range(1, self.inst.attribute_count + 1):
                sub = [j for j in residual if j.attr == r]
                if not sub:
                    counts.append(0)
                    continue
                ab = bounds.attribute_bound(self.inst, r, sub)
                p += ab.combined_p
                counts.append(ab.combined_b)
            hit = (p, tuple(counts))
            if len(self.lb_memo) < 200_000:
                self.lb_memo[key] = hit
        return hit

    def lower_bound(self, i: int) -> int:
        inst, norm = self.inst, self.norm
        rest = inst.jobs[i:]
        isolated = tuple(j for j in rest if not any(self.can_join(b, j) for b in self.batches))
        p_res, counts = self.residual_bound(isolated)
        counts = list(counts)
        for b in self.batches:
            counts[b.attr - 1] += 1
        p = sum(b.lo for b in self.batches) + p_res
        t = sum(self.late_by_machine.values()) + sum(1 for j in rest if j.id in self.always_late)
        sc = bounds.setup_cost_bound(inst, counts)
        return norm.integer(p, sc, t)

    # -- search -------------------------------------------------------------
    def leaf(self):
        inst = self.inst
        try:
            sched = schedule_fixed(
                inst,
                {m: [[j.id for j in b.jobs] for b in seq] for m, seq in self.seqs.items() if seq},
            )
        except DoesNotFit:
            return
        p, sc, t = objective_components(inst, sched)
        cost = self.norm.integer(p, sc, t)
        if self.best_cost is None or cost < self.best_cost:
            self.best_cost = cost
            self.best = sched

    def tick(self) -> bool:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            self.stopped = True
        elif self.nodes % 512 == 0 and time.perf_counter() > self.deadline:
            self.stopped = True
        return not self.stopped

    def worth(self, i: int) -> bool:
        return self.best_cost is None or self.lower_bound(i) < self.best_cost

    def dfs(self, i: int):
        if not self.tick():
            return
        if i == self.inst.n:
            self.leaf()
            return
        job = self.inst.jobs[i]
        for b in list(self.batches):
            if not self.can_join(b, job):
                continue
            saved = (b.lo, b.hi, b.size, b.release)
            b.jobs.append(job)
            b.lo, b.hi = max(b.lo, job.mint), min(b.hi, job.maxt)
            b.size += job.size
            b.release = max(b.release, job.et)
            if self.retime(b.machine) and self.worth(i + 1):
                self.dfs(i + 1)
            b.jobs.pop()
            b.lo, b.hi, b.size, b.release = saved
            self.retime(b.machine)
            if self.stopped:
                return
        for m in sorted(job.eligible):
            if job.size > self.cap[m]:
                continue
            seq = self.seqs[m]
            twin = self.twin[m]
            if not seq and twin is not None and not self.seqs[twin]:
                continue
            nb = _Open(m, job)
            self.batches.append(nb)
            for pos in range(len(seq), -1, -1):
                seq.insert(pos, nb)
                if self.retime(m) and self.worth(i + 1):
                    self.dfs(i + 1)
                seq.pop(pos)
                if self.stopped:
                    break
            self.batches.pop()
            self.retime(m)
            if self.stopped:
                return


def branch_and_bound(
    instance: Instance,
    weights: ObjectiveWeights = DEFAULT_WEIGHTS,
    time_limit: Optional[float] = DEFAULT_TIME_LIMIT,
    incumbent: Optional[Schedule] = None,
    node_limit: Optional[int] = None,
) -> SolveResult:
    """Depth-first branch and bound over batchings.

    Jobs are assigned in id order either to an open batch or to a new batch
    inserted at any position of an eligible machine's sequence, so every
    batching is visited at most once. Nodes are pruned when infeasible or when
    the partial cost plus a bound on the jobs that cannot join open batches
    reaches the incumbent.
    """
    t0 = time.perf_counter()
    deadline = t0 + time_limit if time_limit is not None else float("inf")
    norm = Normalizer.of(instance, weights)
    root = bounds.bound_report(instance, weights)
    search = _Search(instance, weights, deadline, node_limit)
    if incumbent is not None:
        report = validate_schedule(instance, incumbent)
        if not report.feasible:
            raise OSPError(f"incumbent is infeasible: {report.violations[0].detail}")
        search.best = incumbent
        search.best_cost = objective(instance, incumbent, weights).obj_int
    search.dfs(0)
    elapsed = time.perf_counter() - t0

    if search.best is None:
        status = Status.TIMEOUT if search.stopped else Status.INFEASIBLE
        return SolveResult(None, None, status, root.obj_lb, search.nodes, elapsed)
    rep = objective(instance, search.best, weights)
    if search.stopped:
        return SolveResult(search.best, rep, Status.FEASIBLE, min(root.obj_lb, rep.obj_real), search.nodes, elapsed)
    assert rep.obj_int == search.best_cost
    return SolveResult(search.best, rep, Status.OPTIMAL, rep.obj_real, search.nodes, elapsed)
