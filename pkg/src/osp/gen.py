"""Seeded random instance generator.

Three independent PCG64 streams are spawned from the seed (jobs, setup
matrices, machines), so changing the machine count does not perturb the job
draws. ``rho`` and ``tau`` enter ceilings and floors, so they are handled as
exact fractions of their decimal representation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .core import Instance, Job, Machine
from .errors import BadParams

PRNG_NAME = "numpy.random.PCG64 via SeedSequence.spawn(3) [jobs, matrices, machines]"

MATRIX_TYPES = ("constant", "arbitrary", "realistic", "symmetric")

GRID = {
    "n": (10, 25, 50, 100),
    "max_T": (10, 100),
    "max_time": (True, False),
    "rho": (0.1, 0.5),
    "phi": (2, 5),
    "sigma": (0.2, 0.5),
    "s": (5, 20),
    "a": (2, 5),
    "setup_type": MATRIX_TYPES,
    "k": (2, 5),
    "max_C": (20, 100),
    "tau": (0.25, 0.75),
    "max_I": (5,),
}


@dataclass(frozen=True)
class GeneratorParams:
    n: int = 10
    max_T: int = 10
    max_time: bool = True
    rho: float = 0.1
    phi: float = 2
    sigma: float = 0.2
    s: int = 5
    a: int = 2
    setup_time_type: str = "arbitrary"
    setup_cost_type: str = "arbitrary"
    k: int = 2
    max_C: int = 20
    tau: float = 0.25
    max_I: int = 5
    seed: int = 0

    @property
    def min_C(self) -> int:
        return self.s

    def check(self) -> None:
        problems = []
        if self.n < 1 or self.k < 1 or self.a < 1 or self.max_I < 1:
            problems.append("n, k, a and max_I must be positive")
        if self.max_T < 1 or self.s < 1:
            problems.append("max_T and s must be positive")
        if not 0 <= self.rho <= 1:
            problems.append("rho must lie in [0,1]")
        if self.phi < 1:
            problems.append("phi must be >= 1")
        if not 0 <= self.sigma <= 1:
            problems.append("sigma must lie in [0,1]")
        if not 0 < self.tau <= 1:
            problems.append("tau must lie in (0,1]")
        if self.max_C < self.min_C:
            problems.append("max_C must be >= s")
        for t in (self.setup_time_type, self.setup_cost_type):
            if t not in MATRIX_TYPES:
                problems.append(f"unknown matrix type {t!r}")
        if not 0 <= self.seed < 2**64:
            problems.append("seed must be a 64-bit unsigned integer")
        if problems:
            raise BadParams("; ".join(problems))


def grid() -> Iterator[GeneratorParams]:
    """Every configuration of the benchmark grid (seed 0)."""
    keys = list(GRID)
    for values in itertools.product(*(GRID[k] for k in keys)):
        d = dict(zip(keys, values))
        st = d.pop("setup_type")
        yield GeneratorParams(**d, setup_time_type=st, setup_cost_type=st)


def sample_grid(rng: np.random.Generator, **fixed) -> GeneratorParams:
    """One uniformly drawn grid configuration; ``fixed`` overrides fields."""
    d = {k: v[int(rng.integers(len(v)))] for k, v in GRID.items()}
    st = d.pop("setup_type")
    d.update(setup_time_type=st, setup_cost_type=st)
    d.update(fixed)
    return GeneratorParams(**d)


def _exact(x) -> Fraction:
    return Fraction(str(x))


def spread_starts(count: int, lo: int, hi: int, d: int, rng: np.random.Generator) -> list[int]:
    """``count`` sorted integers in ``[lo, hi]`` with pairwise gaps of at least ``d``,
    uniform over all such tuples."""
    if count <= 0:
        return []
    span = hi - (count - 1) * d - lo + 1
    if span < 1:
        raise BadParams(f"cannot place {count} starts {d} apart in [{lo},{hi}]")
    # offsets are a sorted multiset from range(span); drawing distinct values
    # from a widened range and undoing the shift is uniform over multisets
    picks = sorted(int(x) for x in rng.choice(span + count - 1, size=count, replace=False))
    return [lo + x - i + i * d for i, x in enumerate(picks)]


def _matrix(kind: str, a: int, max_T: int, rng: np.random.Generator) -> list[list[int]]:
    hi = -(-max_T // 4)
    if kind == "constant":
        v = int(rng.integers(0, hi, endpoint=True))
        return [[v] * a for _ in range(a)]
    if kind == "arbitrary":
        return [[int(rng.integers(1, hi, endpoint=True)) for _ in range(a)] for _ in range(a)]
    if kind == "realistic":
        same = -(-max_T // 8)
        out = []
        for i in range(a):
            row = []
            for j in range(a):
                if i == j:
                    row.append(int(rng.integers(0, same, endpoint=True)))
                else:
                    row.append(int(rng.integers(same + 1, max(hi, same + 1), endpoint=True)))
            out.append(row)
        return out
    if kind == "symmetric":
        out = [[0] * a for _ in range(a)]
        for i in range(a):
            for j in range(i, a):
                out[i][j] = out[j][i] = int(rng.integers(0, hi, endpoint=True))
        return out
    raise BadParams(f"unknown matrix type {kind!r}")


def generate(params: GeneratorParams) -> Instance:
    params.check()
    p = params
    rho, tau = _exact(p.rho), _exact(p.tau)
    job_ss, mat_ss, mach_ss = np.random.SeedSequence(p.seed).spawn(3)
    rj = np.random.Generator(np.random.PCG64(job_ss))
    rs = np.random.Generator(np.random.PCG64(mat_ss))
    rm = np.random.Generator(np.random.PCG64(mach_ss))

    mint = [int(x) for x in rj.integers(1, p.max_T, size=p.n, endpoint=True)]
    if p.max_time:
        maxt = [int(rj.integers(lo, p.max_T, endpoint=True)) for lo in mint]
    else:
        maxt = [p.max_T] * p.n
    Z = sum(mint)
    et = [int(x) for x in rj.integers(0, math.ceil(rho * Z), size=p.n, endpoint=True)]
    lt = [e + math.floor(float(rj.uniform(1, p.phi)) * m) for e, m in zip(et, mint)]
    eligible = []
    for _ in range(p.n):
        first = int(rj.integers(1, p.k, endpoint=True))
        extra = {m for m in range(1, p.k + 1) if m != first and rj.random() < p.sigma}
        eligible.append(frozenset({first} | extra))
    sizes = [int(x) for x in rj.integers(1, p.s, size=p.n, endpoint=True)]
    attrs = [int(x) for x in rj.integers(1, p.a, size=p.n, endpoint=True)]

    st = _matrix(p.setup_time_type, p.a, p.max_T, rs)
    sc = _matrix(p.setup_cost_type, p.a, p.max_T, rs)
    max_st = max(max(r) for r in st)

    caps = [int(rm.integers(p.min_C, p.max_C, endpoint=True)) for _ in range(p.k)]
    states = [int(rm.integers(1, p.a, endpoint=True)) for _ in range(p.k)]
    horizon = max(et) + math.ceil(Fraction(Z + p.n * max_st) / tau)
    horizon = max(horizon, max(lt))
    d = min(mint) + max_st
    machines = []
    for m in range(p.k):
        count = min(int(rm.integers(1, p.max_I, endpoint=True)), horizon // d)
        first = int(rm.integers(0, min(math.floor(horizon * (1 - tau)), horizon - count * d), endpoint=True))
        starts = [first] + spread_starts(count - 1, first + d, horizon - d, d, rm)
        bounds_ = starts[1:] + [horizon]
        ivs = []
        for s0, s1 in zip(starts, bounds_):
            u = float(rm.uniform(float(tau), 1.0))
            ivs.append((s0, s0 + max(d, math.ceil(u * (s1 - s0)))))
        machines.append(Machine(m + 1, caps[m], states[m], tuple(ivs)))

    jobs = tuple(
        Job(i + 1, eligible[i], et[i], lt[i], mint[i], maxt[i], sizes[i], attrs[i]) for i in range(p.n)
    )
    meta = {
        "generator": {k: (str(v) if isinstance(v, float) else v) for k, v in asdict(p).items()},
        "prng": PRNG_NAME,
        "numpy": np.__version__,
    }
    return Instance(horizon, p.a, tuple(machines), jobs, st, sc, meta)
