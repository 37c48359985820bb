"""Instances, schedules and objective evaluation for the oven scheduling problem.

All ids (machines, jobs, attributes) are 1-based. Objects are frozen; the
objective is evaluated in exact integer / rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import MalformedSchedule

Interval = tuple[int, int]


@dataclass(frozen=True)
class Machine:
    id: int
    capacity: int
    initial_state: int
    availability: tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "availability", tuple((int(s), int(e)) for s, e in self.availability)
        )


@dataclass(frozen=True)
class Job:
    id: int
    eligible: frozenset[int]
    et: int
    lt: Optional[int]
    mint: int
    maxt: int
    size: int
    attr: int

    def __post_init__(self):
        object.__setattr__(self, "eligible", frozenset(self.eligible))


@dataclass(frozen=True)
class Instance:
    horizon: int
    attribute_count: int
    machines: tuple[Machine, ...]
    jobs: tuple[Job, ...]
    setup_times: tuple[tuple[int, ...], ...]
    setup_costs: tuple[tuple[int, ...], ...]
    metadata: Optional[Mapping] = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "machines", tuple(self.machines))
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(self, "setup_times", tuple(tuple(r) for r in self.setup_times))
        object.__setattr__(self, "setup_costs", tuple(tuple(r) for r in self.setup_costs))

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def k(self) -> int:
        return len(self.machines)

    @property
    def a(self) -> int:
        return self.attribute_count

    def job(self, j: int) -> Job:
        return self.jobs[j - 1]

    def machine(self, m: int) -> Machine:
        return self.machines[m - 1]

    def st(self, a1: int, a2: int) -> int:
        return self.setup_times[a1 - 1][a2 - 1]

    def sc(self, a1: int, a2: int) -> int:
        return self.setup_costs[a1 - 1][a2 - 1]

    @property
    def max_st(self) -> int:
        return max((v for row in self.setup_times for v in row), default=0)

    @property
    def max_sc(self) -> int:
        return max((v for row in self.setup_costs for v in row), default=0)

    @property
    def min_t(self) -> int:
        return min(j.mint for j in self.jobs)

    @property
    def max_t(self) -> int:
        return max(j.maxt for j in self.jobs)

    @property
    def max_capacity(self) -> int:
        return max(m.capacity for m in self.machines)


@dataclass(frozen=True)
class Batch:
    machine: int
    start: int
    proc: int
    jobs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))

    @property
    def end(self) -> int:
        return self.start + self.proc


@dataclass(frozen=True)
class Schedule:
    batches: tuple[Batch, ...]

    def __post_init__(self):
        object.__setattr__(self, "batches", tuple(self.batches))

    def by_machine(self) -> dict[int, list[Batch]]:
        """Batches grouped per machine, each list ordered by start time."""
        out: dict[int, list[Batch]] = {}
        for b in self.batches:
            out.setdefault(b.machine, []).append(b)
        for seq in out.values():
            seq.sort(key=lambda b: (b.start, b.proc, b.jobs))
        return out

    def batch_of(self) -> dict[int, Batch]:
        return {j: b for b in self.batches for j in b.jobs}


@dataclass(frozen=True)
class ObjectiveWeights:
    p: int = 4
    sc: int = 1
    t: int = 100

    def __post_init__(self):
        if min(self.p, self.sc, self.t) < 0 or self.p + self.sc + self.t == 0:
            raise ValueError("weights must be non-negative and not all zero")

    @property
    def total(self) -> int:
        return self.p + self.sc + self.t


DEFAULT_WEIGHTS = ObjectiveWeights()


@dataclass(frozen=True)
class Normalizer:
    """Instance constants that turn (p, sc, t) into objective values."""

    n: int
    avg_t: int
    max_sc1: int
    C: int
    weights: ObjectiveWeights

    @classmethod
    def of(cls, instance: Instance, weights: ObjectiveWeights = DEFAULT_WEIGHTS) -> "Normalizer":
        n = instance.n
        avg_t = -(-sum(j.mint for j in instance.jobs) // n)
        max_sc1 = max(instance.max_sc, 1)
        return cls(n, avg_t, max_sc1, math.lcm(avg_t, max_sc1), weights)

    @property
    def coef_p(self) -> int:
        return self.weights.p * self.C // self.avg_t

    @property
    def coef_sc(self) -> int:
        return self.weights.sc * self.C // self.max_sc1

    @property
    def coef_t(self) -> int:
        return self.weights.t * self.C

    @property
    def scale(self) -> int:
        return self.C * self.n * self.weights.total

    def integer(self, p: int, sc: int, t: int) -> int:
        return self.coef_p * p + self.coef_sc * sc + self.coef_t * t

    def real(self, p: int, sc: int, t: int) -> Fraction:
        w = self.weights
        return (
            Fraction(w.p * p, self.avg_t * self.n)
            + Fraction(w.sc * sc, self.max_sc1 * self.n)
            + Fraction(w.t * t, self.n)
        ) / w.total


@dataclass(frozen=True)
class ObjectiveReport:
    p: int
    sc: int
    t: int
    avg_t: int
    C: int
    obj_int: int
    obj_real: Fraction

    @property
    def obj_decimal(self) -> str:
        return format_fraction(self.obj_real)


def format_fraction(x: Fraction, digits: int = 6) -> str:
    """Decimal rendering with round-half-even."""
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(x.numerator) / Decimal(x.denominator)
        return str(d.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN))


def _check_structure(instance: Instance, schedule: Schedule) -> None:
    seen: dict[int, int] = {}
    for b in schedule.batches:
        if not b.jobs:
            raise MalformedSchedule("empty batch")
        for j in b.jobs:
            if not 1 <= j <= instance.n:
                raise MalformedSchedule(f"unknown job {j}")
            seen[j] = seen.get(j, 0) + 1
    dup = sorted(j for j, c in seen.items() if c > 1)
    missing = sorted(set(range(1, instance.n + 1)) - set(seen))
    if dup or missing:
        raise MalformedSchedule(f"duplicated jobs {dup}, missing jobs {missing}")


def batch_attr(instance: Instance, batch: Batch) -> int:
    """Attribute of a batch, taken from its first member."""
    return instance.job(batch.jobs[0]).attr


def objective_components(instance: Instance, schedule: Schedule) -> tuple[int, int, int]:
    _check_structure(instance, schedule)
    p = sum(b.proc for b in schedule.batches)
    sc = 0
    for m, seq in schedule.by_machine().items():
        prev = instance.machine(m).initial_state
        for b in seq:
            a = batch_attr(instance, b)
            sc += instance.sc(prev, a)
            prev = a
    t = 0
    for b in schedule.batches:
        for j in b.jobs:
            lt = instance.job(j).lt
            if lt is not None and b.end > lt:
                t += 1
    return p, sc, t


def report_from_components(
    instance: Instance, p: int, sc: int, t: int, weights: ObjectiveWeights = DEFAULT_WEIGHTS
) -> ObjectiveReport:
    norm = Normalizer.of(instance, weights)
    return ObjectiveReport(
        p=p,
        sc=sc,
        t=t,
        avg_t=norm.avg_t,
        C=norm.C,
        obj_int=norm.integer(p, sc, t),
        obj_real=norm.real(p, sc, t),
    )


def objective(
    instance: Instance, schedule: Schedule, weights: ObjectiveWeights = DEFAULT_WEIGHTS
) -> ObjectiveReport:
    p, sc, t = objective_components(instance, schedule)
    return report_from_components(instance, p, sc, t, weights)


def normalize_intervals(instance: Instance) -> Instance:
    """Pad every machine to the same number of intervals with empty ``[l, l]`` entries."""
    width = max((len(m.availability) for m in instance.machines), default=0)
    if all(len(m.availability) == width for m in instance.machines):
        return instance
    pad = (instance.horizon, instance.horizon)
    machines = tuple(
        replace(m, availability=m.availability + (pad,) * (width - len(m.availability)))
        for m in instance.machines
    )
    return replace(instance, machines=machines)


def make_instance(
    horizon: int,
    setup_times: Sequence[Sequence[int]],
    setup_costs: Sequence[Sequence[int]],
    machines: Iterable[tuple],
    jobs: Iterable[tuple],
    metadata: Optional[Mapping] = None,
) -> Instance:
    """Convenience builder from plain tuples.

    ``machines`` rows are ``(capacity, initial_state, intervals)`` and ``jobs``
    rows are ``(eligible, et, lt, mint, maxt, size, attr)``; ids are assigned
    in order starting at 1.
    """
    ms = tuple(Machine(i, c, s, tuple(iv)) for i, (c, s, iv) in enumerate(machines, 1))
    js = tuple(Job(i, frozenset(e), *rest) for i, (e, *rest) in enumerate(jobs, 1))
    return Instance(horizon, len(setup_times), ms, js, setup_times, setup_costs, metadata)
