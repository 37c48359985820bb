"""Shared fixtures for the test modules: fixed instance families, schedule
mutations and small independent oracles."""

from __future__ import annotations

import functools
import itertools
from dataclasses import replace
from typing import Callable, Iterator, Optional

import numpy as np

from osp.core import Batch, Instance, Job, Schedule, batch_attr
from osp.gen import GeneratorParams, generate, sample_grid
from osp.validate import Code

# ---------------------------------------------------------------------------
# instance families

FAMILY_SIZES = (10, 25, 50, 100)
FAMILY_PER_SIZE = 20
FAMILY_RNG_SEED = 20220
SMALL_RNG_SEED = 4
SMALL_COUNT = 100


def heuristic_family() -> Iterator[tuple[GeneratorParams, Instance]]:
    """80 grid instances, 20 for each size, from one fixed configuration stream."""
    rng = np.random.default_rng(FAMILY_RNG_SEED)
    for size in FAMILY_SIZES:
        for i in range(FAMILY_PER_SIZE):
            params = sample_grid(rng, n=size, seed=size * 100 + i)
            yield params, generate(params)


def small_family(count: int = SMALL_COUNT, seed: int = SMALL_RNG_SEED) -> Iterator[tuple[GeneratorParams, Instance]]:
    """Grid instances with 1 to 6 jobs."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(1, 7))
        params = sample_grid(rng, n=n, seed=i)
        yield params, generate(params)


# ---------------------------------------------------------------------------
# independent oracles


def exhaustive_fixed_start(instance: Instance, batching: dict[int, list[tuple[int, ...]]]) -> Optional[list[int]]:
    """Earliest starts of a fixed batching found by scanning every integer time.

    Returns the list of starts in machine/sequence order, or None when some
    batch cannot be placed.
    """
    starts = []
    for m in sorted(batching):
        mach = instance.machine(m)
        prev_attr, ready = mach.initial_state, 0
        for group in batching[m]:
            members = [instance.job(j) for j in group]
            attr = members[0].attr
            proc = max(j.mint for j in members)
            setup = instance.st(prev_attr, attr)
            found = None
            for t in range(0, instance.horizon + 1):
                if t < max(j.et for j in members) or t - setup < ready:
                    continue
                if any(s <= t - setup and t + proc <= e for s, e in mach.availability):
                    found = t
                    break
            if found is None:
                return None
            starts.append(found)
            prev_attr, ready = attr, found + proc
    return starts


def osp_star_optimum(windows: tuple[tuple[int, int], ...], c: int) -> tuple[int, int]:
    """Minimum batch count and minimum cumulative batch time for unit jobs with
    processing windows, batches of at most ``c`` jobs, found by exhaustive search."""
    kinds = sorted(set(windows))
    return _star(tuple((w, windows.count(w)) for w in kinds), c)


@functools.lru_cache(maxsize=None)
def _star(state: tuple[tuple[tuple[int, int], int], ...], c: int) -> tuple[int, int]:
    if not state:
        return 0, 0
    best_b = best_p = None
    # every batch that contains one copy of the first remaining kind
    ranges = [range(1 if i == 0 else 0, min(q, c) + 1) for i, (_, q) in enumerate(state)]
    for take in itertools.product(*ranges):
        if sum(take) > c:
            continue
        chosen = [w for (w, _), t in zip(state, take) if t]
        lo = max(w[0] for w in chosen)
        if lo > min(w[1] for w in chosen):
            continue
        rest = tuple((w, q - t) for (w, q), t in zip(state, take) if q - t)
        b, p = _star(rest, c)
        best_b = b + 1 if best_b is None else min(best_b, b + 1)
        best_p = p + lo if best_p is None else min(best_p, p + lo)
    return best_b, best_p


# ---------------------------------------------------------------------------
# mutations: each turns a feasible (instance, schedule) pair into one that
# violates exactly one constraint family

MUTATION_PARAMS = dict(n=10, k=2, a=3, max_I=1, setup_time_type="arbitrary", setup_cost_type="arbitrary")


def _replace_job(inst: Instance, job: Job) -> Instance:
    jobs = tuple(job if j.id == job.id else j for j in inst.jobs)
    return replace(inst, jobs=jobs)


def _replace_interval(inst: Instance, m: int, old: tuple[int, int], new: tuple[int, int]) -> Instance:
    machines = tuple(
        replace(mach, availability=tuple(new if iv == old else iv for iv in mach.availability))
        if mach.id == m
        else mach
        for mach in inst.machines
    )
    return replace(inst, machines=machines)


def _interval_of(inst: Instance, b: Batch) -> tuple[int, int]:
    return next((s, e) for s, e in inst.machine(b.machine).availability if s <= b.start and b.end <= e)


def _setup_before(inst: Instance, sched: Schedule, b: Batch) -> int:
    seq = sched.by_machine()[b.machine]
    i = seq.index(b)
    prev = inst.machine(b.machine).initial_state if i == 0 else batch_attr(inst, seq[i - 1])
    return inst.st(prev, batch_attr(inst, b))


def mutate_release(inst: Instance, sched: Schedule, rng) -> tuple[Instance, Schedule]:
    b = sched.batches[int(rng.integers(len(sched.batches)))]
    job = inst.job(b.jobs[int(rng.integers(len(b.jobs)))])
    lt = job.lt if job.lt is None or job.lt > b.start + 1 else b.start + 2
    return _replace_job(inst, replace(job, et=b.start + 1, lt=lt)), sched


def mutate_proc_window(inst, sched, rng):
    b = sched.batches[int(rng.integers(len(sched.batches)))]
    job = inst.job(b.jobs[int(rng.integers(len(b.jobs)))])
    mint = b.proc + 1
    return _replace_job(inst, replace(job, mint=mint, maxt=max(job.maxt, mint))), sched


def mutate_capacity(inst, sched, rng):
    b = sched.batches[int(rng.integers(len(sched.batches)))]
    job = inst.job(b.jobs[0])
    load = sum(inst.job(j).size for j in b.jobs)
    grow = inst.machine(b.machine).capacity - load + 1
    return _replace_job(inst, replace(job, size=job.size + grow)), sched


def mutate_eligibility(inst, sched, rng):
    b = sched.batches[int(rng.integers(len(sched.batches)))]
    job = inst.job(b.jobs[int(rng.integers(len(b.jobs)))])
    others = frozenset(m.id for m in inst.machines if m.id != b.machine)
    return _replace_job(inst, replace(job, eligible=others)), sched


def mutate_attribute(inst, sched, rng):
    """Append a job with a different attribute to a batch; it is never the
    batch's first member so setups are unchanged."""
    idx = int(rng.integers(len(sched.batches)))
    b = sched.batches[idx]
    attr = batch_attr(inst, b) % inst.attribute_count + 1
    new = Job(inst.n + 1, frozenset({b.machine}), 0, None, b.proc, b.proc, 1, attr)
    load = sum(inst.job(j).size for j in b.jobs) + 1
    machines = tuple(
        replace(m, capacity=max(m.capacity, load)) if m.id == b.machine else m for m in inst.machines
    )
    inst = replace(inst, jobs=inst.jobs + (new,), machines=machines)
    batches = list(sched.batches)
    batches[idx] = replace(b, jobs=b.jobs + (new.id,))
    return inst, Schedule(tuple(batches))


def mutate_setup_fit(inst, sched, rng):
    """Move the interval start so the body still fits but its setup does not."""
    b = sched.batches[int(rng.integers(len(sched.batches)))]
    seq = sched.by_machine()[b.machine]
    iv = _interval_of(inst, b)
    first = next(x for x in seq if _interval_of(inst, x) == iv)
    setup = _setup_before(inst, sched, first)
    assert setup >= 1, "arbitrary setup matrices have positive entries"
    return _replace_interval(inst, first.machine, iv, (first.start - setup + 1, iv[1])), sched


def mutate_interval_fit(inst, sched, rng):
    """Cut the interval end just before the last batch inside it finishes."""
    b = sched.batches[int(rng.integers(len(sched.batches)))]
    seq = sched.by_machine()[b.machine]
    iv = _interval_of(inst, b)
    last = [x for x in seq if _interval_of(inst, x) == iv][-1]
    return _replace_interval(inst, last.machine, iv, (iv[0], last.end - 1)), sched


def mutate_overlap(inst, sched, rng):
    """Pull a batch forward so it starts one unit before its setup allows."""
    pairs = [
        (seq[i - 1], seq[i]) for seq in sched.by_machine().values() for i in range(1, len(seq))
    ]
    prev, b = pairs[int(rng.integers(len(pairs)))]
    start = prev.end + _setup_before(inst, sched, b) - 1
    for j in b.jobs:
        job = inst.job(j)
        if job.et > start:
            inst = _replace_job(inst, replace(job, et=start))
    batches = tuple(replace(x, start=start) if x == b else x for x in sched.batches)
    return inst, Schedule(batches)


def mutate_structure(inst, sched, rng):
    idx = int(rng.integers(len(sched.batches)))
    b = sched.batches[idx]
    batches = list(sched.batches)
    if len(b.jobs) > 1:
        batches[idx] = replace(b, jobs=b.jobs[1:])
    else:
        del batches[idx]
    return inst, Schedule(tuple(batches))


MUTATIONS: dict[Code, Callable] = {
    Code.RELEASE: mutate_release,
    Code.PROC_WINDOW: mutate_proc_window,
    Code.OVERLAP: mutate_overlap,
    Code.INTERVAL_FIT: mutate_interval_fit,
    Code.SETUP_FIT: mutate_setup_fit,
    Code.CAPACITY: mutate_capacity,
    Code.ATTRIBUTE: mutate_attribute,
    Code.ELIGIBILITY: mutate_eligibility,
}


def feasible_base(inst: Instance) -> Schedule:
    """A feasible schedule to mutate: the heuristic's, or an exact solve when it fails."""
    from osp.errors import Unschedulable
    from osp.heuristic import construct
    from osp.solve import branch_and_bound

    try:
        return construct(inst)
    except Unschedulable:
        result = branch_and_bound(inst, time_limit=None, node_limit=200_000)
        assert result.schedule is not None
        return result.schedule
