"""Lower bounds on batch counts, processing time, setup costs and tardy jobs.

Every per-attribute routine accepts an optional ``jobs`` subset so the exact
solver can bound residual sub-problems without rebuilding an instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import DEFAULT_WEIGHTS, Instance, Job, Normalizer, ObjectiveWeights
from .errors import CapacityZero


@dataclass(frozen=True)
class UnitJobInterval:
    lo: int
    hi: int
    multiplicity: int = 1
    job: int = 0

    def __post_init__(self):
        if self.lo > self.hi or self.multiplicity < 1:
            raise ValueError(f"bad unit job {self}")


@dataclass(frozen=True)
class GacBatch:
    proc: int
    members: tuple[tuple[int, int], ...]  # (position in input, units)


@dataclass(frozen=True)
class AttributeBound:
    attribute: int
    large_jobs: tuple[int, ...]
    large_count: int
    large_proc: int
    simple_cap_count: int
    b_E: int
    p_E: int
    b_C: int
    p_C: int

    @property
    def combined_b(self) -> int:
        return self.large_count + max(self.b_E, self.b_C)

    @property
    def combined_p(self) -> int:
        return self.large_proc + max(self.p_E, self.p_C)


@dataclass(frozen=True)
class BoundReport:
    per_attribute: tuple[AttributeBound, ...]
    batch_count_lb: int
    proc_time_lb: int
    setup_cost_lb: int
    tardy_lb: int
    obj_lb: Fraction
    obj_int_lb: int
    unschedulable: tuple[int, ...] = ()

    @property
    def simple_cap_sum(self) -> int:
        return sum(ab.simple_cap_count for ab in self.per_attribute)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _attr_jobs(instance: Instance, r: int, jobs: Optional[Iterable[Job]]) -> list[Job]:
    pool = instance.jobs if jobs is None else jobs
    return [j for j in pool if j.attr == r]


def simple_cap_bound(instance: Instance, r: int, jobs: Optional[Iterable[Job]] = None) -> int:
    total = sum(j.size for j in _attr_jobs(instance, r, jobs))
    return _ceil_div(total, instance.max_capacity)


def split_large_small(
    instance: Instance, r: int, jobs: Optional[Iterable[Job]] = None
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Large jobs of attribute ``r`` cannot share a batch with any other job of ``r``."""
    members = _attr_jobs(instance, r, jobs)
    if not members:
        return (), ()
    smallest = min(j.size for j in members)
    large, small = [], []
    for j in members:
        room = max(instance.machine(m).capacity for m in j.eligible) - j.size
        (large if room < smallest else small).append(j.id)
    return tuple(large), tuple(small)


def eligibility_bound(
    instance: Instance, r: int, jobs: Optional[Iterable[Job]] = None
) -> tuple[int, int]:
    """(b_E, p_E) for the small jobs of attribute ``r``."""
    return _eligibility(instance, split_large_small(instance, r, jobs)[1])


def _eligibility(instance: Instance, small: Sequence[int]) -> tuple[int, int]:
    jobs = [instance.job(j) for j in small]
    if not jobs:
        return 0, 0
    max_c = instance.max_capacity
    pinned: dict[int, list[Job]] = {}
    multi: list[Job] = []
    for j in jobs:
        if len(j.eligible) == 1:
            pinned.setdefault(next(iter(j.eligible)), []).append(j)
        else:
            multi.append(j)

    count = 0
    spare = 0
    times: list[int] = []
    charged: set[int] = set()
    for m in sorted(pinned):
        c = instance.machine(m).capacity
        load = sum(j.size for j in pinned[m])
        need = _ceil_div(load, c)
        count += need
        spare += need * c - load
        group = sorted(pinned[m], key=lambda j: (j.mint, j.id))
        for j in [group[-1]] + group[: need - 1]:
            times.append(j.mint)
            charged.add(j.id)

    rest = sum(j.size for j in multi)
    extra = _ceil_div(max(0, rest - spare), max_c)
    slots = extra
    if multi:
        top = max(multi, key=lambda j: (j.mint, -j.id))
        if not times or top.mint > max(times):
            if times:
                # the replaced pinned job stays charged: it may share the batch of ``top``
                times.remove(max(times))
            times.append(top.mint)
            charged.add(top.id)
            slots = max(extra - 1, 0)
    # Extra batches can be formed by leftover pinned jobs as well, so their
    # times come from every small job not yet charged.
    pool = sorted(j.mint for j in jobs if j.id not in charged)
    times.extend(pool[:slots])
    return count + extra, sum(times)


def gac_plus(
    unit_jobs: Sequence[UnitJobInterval], c: int
) -> tuple[int, int, tuple[GacBatch, ...]]:
    """Greedy clique cover of unit jobs on an interval graph with batch size ``c``.

    Jobs are taken by non-increasing ``lo``; ties keep input order. Each batch
    is labelled by the first unplaced job and filled with the first ``c``
    unplaced units whose window contains the label's ``lo``. Returns the batch
    count, the summed batch times and the batches themselves.
    """
    if c < 1:
        raise CapacityZero(f"capacity {c} < 1")
    order = sorted(range(len(unit_jobs)), key=lambda i: -unit_jobs[i].lo)
    remaining = {i: unit_jobs[i].multiplicity for i in order}
    batches: list[GacBatch] = []
    head = 0
    while head < len(order):
        if remaining[order[head]] == 0:
            head += 1
            continue
        label = unit_jobs[order[head]].lo
        room = c
        taken: list[tuple[int, int]] = []
        for i in order[head:]:
            if room == 0:
                break
            u = unit_jobs[i]
            if remaining[i] and u.lo <= label <= u.hi:
                q = min(remaining[i], room)
                remaining[i] -= q
                room -= q
                taken.append((i, q))
        batches.append(GacBatch(label, tuple(taken)))
    return len(batches), sum(b.proc for b in batches), tuple(batches)


def compat_bound(
    instance: Instance, r: int, jobs: Optional[Iterable[Job]] = None
) -> tuple[int, int]:
    """(b_C, p_C): GAC+ over the small jobs of ``r`` split into unit-size copies."""
    return _compat(instance, split_large_small(instance, r, jobs)[1])


def _compat(instance: Instance, small: Sequence[int]) -> tuple[int, int]:
    units = [
        UnitJobInterval(j.mint, j.maxt, j.size, j.id)
        for j in sorted((instance.job(i) for i in small), key=lambda j: j.id)
    ]
    if not units:
        return 0, 0
    count, total, _ = gac_plus(units, instance.max_capacity)
    return count, total


def attribute_bound(instance: Instance, r: int, jobs: Optional[Iterable[Job]] = None) -> AttributeBound:
    if jobs is not None:
        jobs = list(jobs)
    large, small = split_large_small(instance, r, jobs)
    b_E, p_E = _eligibility(instance, small)
    b_C, p_C = _compat(instance, small)
    return AttributeBound(
        attribute=r,
        large_jobs=large,
        large_count=len(large),
        large_proc=sum(instance.job(j).mint for j in large),
        simple_cap_count=simple_cap_bound(instance, r, jobs),
        b_E=b_E,
        p_E=p_E,
        b_C=b_C,
        p_C=p_C,
    )


def setup_cost_bound(instance: Instance, counts: Sequence[int]) -> int:
    """Setup cost bound given per-attribute batch counts (``counts[r-1]``)."""
    a = instance.attribute_count
    total = sum(counts)
    if total == 0:
        return 0
    col_min = [min(instance.sc(s, r) for s in range(1, a + 1)) for r in range(1, a + 1)]
    row_min = [min(instance.sc(r, s) for s in range(1, a + 1)) for r in range(1, a + 1)]
    before = sum(b * col_min[r] for r, b in enumerate(counts))
    pool = [row_min[r] for r, b in enumerate(counts) for _ in range(b)]
    pool += [row_min[m.initial_state - 1] for m in instance.machines]
    after = sum(sorted(pool)[:total])
    return max(before, after)


def earliest_alone(instance: Instance, job: Job, machine: int) -> Optional[int]:
    """Earliest completion of ``job`` processed on its own on ``machine``.

    The setup lead is the cheapest transition into the job's attribute from any
    predecessor state, which keeps the value a valid lower bound.
    """
    a = instance.attribute_count
    lead = min(instance.st(s, job.attr) for s in range(1, a + 1))
    for s, e in instance.machine(machine).availability:
        start = max(job.et, s + lead)
        if start + job.mint <= e:
            return start + job.mint
    return None


def always_tardy(instance: Instance) -> tuple[set[int], set[int]]:
    """(jobs late in every schedule, jobs that fit on no eligible machine)."""
    late, stuck = set(), set()
    for job in instance.jobs:
        ends = [earliest_alone(instance, job, m) for m in sorted(job.eligible)]
        finite = [e for e in ends if e is not None]
        if not finite:
            stuck.add(job.id)
        if job.lt is not None and (not finite or min(finite) > job.lt):
            late.add(job.id)
    return late, stuck


def tardy_bound(instance: Instance) -> int:
    return len(always_tardy(instance)[0])


def bound_report(instance: Instance, weights: ObjectiveWeights = DEFAULT_WEIGHTS) -> BoundReport:
    per = tuple(attribute_bound(instance, r) for r in range(1, instance.attribute_count + 1))
    b = sum(ab.combined_b for ab in per)
    p = sum(ab.combined_p for ab in per)
    sc = setup_cost_bound(instance, [ab.combined_b for ab in per])
    late, stuck = always_tardy(instance)
    t = len(late)
    norm = Normalizer.of(instance, weights)
    return BoundReport(
        per_attribute=per,
        batch_count_lb=b,
        proc_time_lb=p,
        setup_cost_lb=sc,
        tardy_lb=t,
        obj_lb=norm.real(p, sc, t),
        obj_int_lb=norm.integer(p, sc, t),
        unschedulable=tuple(sorted(stuck)),
    )
