"""Export an instance as a mixed-integer linear program in CPLEX LP format.

Every machine gets ``n`` batch slots. Slot ``b`` on machine ``m`` carries

* ``X_m_b_j``   job ``j`` is in the slot
* ``S_m_b``, ``P_m_b``  start and processing time
* ``Y_m_b_r``   one-hot attribute, ``r = 0`` meaning the slot is empty
* ``E_m_b``     empty-slot flag (equal to ``Y_m_b_0``)
* ``I_m_b_i``   the availability interval used; the last one is ``[l, l]``
* ``T_m_b_j``   job ``j`` finishes late in this slot (only for jobs that can be late)
* ``Z_m_b_r_q`` product ``Y_m_b_r * Y_m_(b+1)_q`` used to look up setups
* ``st_m_b``, ``sc_m_b`` setup time and cost towards the next slot

Strict inequalities are written as ``>= value + 1`` since all data is integral.
Big-M values are derived row by row from the horizon and the largest
processing time.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional, Union

from .core import DEFAULT_WEIGHTS, Instance, Normalizer, ObjectiveWeights, normalize_intervals
from .errors import Unsupported

COEFFICIENT_LIMIT = 2**63 - 1
_TERMS_PER_LINE = 8

Term = tuple[int, str]


def _expr(terms: Iterable[Term]) -> str:
    parts = []
    for coef, var in terms:
        if coef == 0:
            continue
        if abs(coef) > COEFFICIENT_LIMIT:
            raise Unsupported(f"coefficient {coef} of {var} does not fit in 63 bits")
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        parts.append(f"{sign} {var}" if mag == 1 else f"{sign} {mag} {var}")
    if not parts:
        return "0"
    if parts[0].startswith("+ "):
        parts[0] = parts[0][2:]
    lines = [" ".join(parts[i : i + _TERMS_PER_LINE]) for i in range(0, len(parts), _TERMS_PER_LINE)]
    return "\n   ".join(lines)


class _Model:
    def __init__(self):
        self.rows: list[str] = []
        self.names: set[str] = set()

    def row(self, name: str, terms: Iterable[Term], sense: str, rhs: int) -> None:
        if name in self.names:
            raise AssertionError(f"duplicate row {name}")
        if abs(rhs) > COEFFICIENT_LIMIT:
            raise Unsupported(f"right-hand side of {name} does not fit in 63 bits")
        self.names.add(name)
        self.rows.append(f" {name}: {_expr(terms)} {sense} {rhs}")


def export_ilp(instance: Instance, weights: ObjectiveWeights = DEFAULT_WEIGHTS) -> str:
    inst = normalize_intervals(instance)
    norm = Normalizer.of(inst, weights)
    n, a, l = inst.n, inst.attribute_count, inst.horizon
    max_T = inst.max_t
    slots = range(1, n + 1)
    attrs = range(1, a + 1)
    jobs = inst.jobs
    model = _Model()

    def X(m, b, j):
        return f"X_{m}_{b}_{j}"

    def S(m, b):
        return f"S_{m}_{b}"

    def P(m, b):
        return f"P_{m}_{b}"

    def Y(m, b, r):
        return f"Y_{m}_{b}_{r}"

    def E(m, b):
        return f"E_{m}_{b}"

    def I(m, b, i):
        return f"I_{m}_{b}_{i}"

    def T(m, b, j):
        return f"T_{m}_{b}_{j}"

    def Z(m, b, r, q):
        return f"Z_{m}_{b}_{r}_{q}"

    def ST(m, b):
        return f"st_{m}_{b}"

    def SC(m, b):
        return f"sc_{m}_{b}"

    # a job can only be late if its due date is before the horizon
    can_be_late = [j for j in jobs if j.lt is not None and j.lt < l]
    intervals = {m.id: list(m.availability) + [(l, l)] for m in inst.machines}

    objective: list[Term] = []
    for m in inst.machines:
        for b in slots:
            objective.append((norm.coef_p, P(m.id, b)))
        for b in range(1, n):
            objective.append((norm.coef_sc, SC(m.id, b)))
        for r in attrs:
            objective.append((norm.coef_sc * inst.sc(m.initial_state, r), Y(m.id, 1, r)))
        for b in slots:
            for j in can_be_late:
                objective.append((norm.coef_t, T(m.id, b, j.id)))

    for j in jobs:
        model.row(f"assign_{j.id}", [(1, X(m.id, b, j.id)) for m in inst.machines for b in slots], "=", 1)
    for j in jobs:
        model.row(
            f"elig_{j.id}",
            [(1, X(m.id, b, j.id)) for m in inst.machines if m.id in j.eligible for b in slots],
            "=",
            1,
        )

    for m in inst.machines:
        mid = m.id
        ivs = intervals[mid]
        for b in slots:
            for j in jobs:
                x = X(mid, b, j.id)
                model.row(f"release_{mid}_{b}_{j.id}", [(1, S(mid, b)), (-j.et, x)], ">=", 0)
                model.row(f"pmin_{mid}_{b}_{j.id}", [(1, P(mid, b)), (-j.mint, x)], ">=", 0)
                model.row(f"pmax_{mid}_{b}_{j.id}", [(1, P(mid, b)), (max_T - j.maxt, x)], "<=", max_T)
                model.row(f"attr_{mid}_{b}_{j.id}", [(1, x), (-1, Y(mid, b, j.attr))], "<=", 0)
                model.row(f"nonempty_{mid}_{b}_{j.id}", [(1, x), (1, E(mid, b))], "<=", 1)
            model.row(f"cap_{mid}_{b}", [(j.size, X(mid, b, j.id)) for j in jobs], "<=", m.capacity)
            model.row(f"onehot_{mid}_{b}", [(1, Y(mid, b, r)) for r in range(0, a + 1)], "=", 1)
            model.row(f"emptyattr_{mid}_{b}", [(1, Y(mid, b, 0)), (-1, E(mid, b))], "=", 0)
            model.row(
                f"empty_{mid}_{b}", [(1, X(mid, b, j.id)) for j in jobs] + [(1, E(mid, b))], ">=", 1
            )
            model.row(f"emptystart_{mid}_{b}", [(1, S(mid, b)), (-l, E(mid, b))], ">=", 0)
            model.row(f"emptyproc_{mid}_{b}", [(1, P(mid, b)), (max_T, E(mid, b))], "<=", max_T)
            model.row(f"emptyiv_{mid}_{b}", [(1, E(mid, b)), (-1, I(mid, b, len(ivs)))], "<=", 0)
            if b < n:
                model.row(f"grouped_{mid}_{b}", [(1, E(mid, b)), (-1, E(mid, b + 1))], "<=", 0)
                model.row(
                    f"order_{mid}_{b}",
                    [(1, S(mid, b + 1)), (-1, S(mid, b)), (-1, P(mid, b)), (-1, ST(mid, b))],
                    ">=",
                    0,
                )

            model.row(f"oneiv_{mid}_{b}", [(1, I(mid, b, i)) for i in range(1, len(ivs) + 1)], "=", 1)
            if b == 1:
                lead = [(-inst.st(m.initial_state, r), Y(mid, 1, r)) for r in attrs]
            else:
                lead = [(-1, ST(mid, b - 1))]
            for i, (s, e) in enumerate(ivs, 1):
                iv = I(mid, b, i)
                model.row(f"ivstart_{mid}_{b}_{i}", [(1, S(mid, b)), (-s, iv)], ">=", 0)
                model.row(f"ivsetup_{mid}_{b}_{i}", [(1, S(mid, b))] + lead + [(-s, iv)], ">=", 0)
                model.row(f"ivend_{mid}_{b}_{i}", [(1, S(mid, b)), (1, P(mid, b)), (l - e, iv)], "<=", l)

            for j in can_be_late:
                x, t = X(mid, b, j.id), T(mid, b, j.id)
                model.row(f"late_{mid}_{b}_{j.id}", [(1, t), (-1, x)], "<=", 0)
                model.row(
                    f"ontime_{mid}_{b}_{j.id}",
                    [(1, S(mid, b)), (1, P(mid, b)), (l - j.lt, x), (j.lt - l, t)],
                    "<=",
                    l,
                )
                model.row(f"strict_{mid}_{b}_{j.id}", [(1, S(mid, b)), (1, P(mid, b)), (-(j.lt + 1), t)], ">=", 0)

        for b in range(1, n):
            for r in attrs:
                for q in attrs:
                    z = Z(mid, b, r, q)
                    model.row(f"zl_{mid}_{b}_{r}_{q}", [(1, z), (-1, Y(mid, b, r))], "<=", 0)
                    model.row(f"zr_{mid}_{b}_{r}_{q}", [(1, z), (-1, Y(mid, b + 1, q))], "<=", 0)
                    model.row(
                        f"zb_{mid}_{b}_{r}_{q}", [(1, z), (-1, Y(mid, b, r)), (-1, Y(mid, b + 1, q))], ">=", -1
                    )
            pairs = [(r, q) for r in attrs for q in attrs]
            model.row(
                f"stdef_{mid}_{b}",
                [(1, ST(mid, b))] + [(-inst.st(r, q), Z(mid, b, r, q)) for r, q in pairs],
                "=",
                0,
            )
            model.row(
                f"scdef_{mid}_{b}",
                [(1, SC(mid, b))] + [(-inst.sc(r, q), Z(mid, b, r, q)) for r, q in pairs],
                "=",
                0,
            )

    bounds, general, binary = [], [], []
    for m in inst.machines:
        mid = m.id
        for b in slots:
            bounds.append(f" 0 <= {S(mid, b)} <= {l}")
            bounds.append(f" 0 <= {P(mid, b)} <= {max_T}")
            general += [S(mid, b), P(mid, b)]
            binary += [X(mid, b, j.id) for j in jobs]
            binary += [Y(mid, b, r) for r in range(0, a + 1)]
            binary.append(E(mid, b))
            binary += [I(mid, b, i) for i in range(1, len(intervals[mid]) + 1)]
            binary += [T(mid, b, j.id) for j in can_be_late]
        for b in range(1, n):
            bounds.append(f" 0 <= {ST(mid, b)} <= {inst.max_st}")
            bounds.append(f" 0 <= {SC(mid, b)} <= {inst.max_sc}")
            binary += [Z(mid, b, r, q) for r in attrs for q in attrs]

    def block(names: list[str]) -> list[str]:
        return [" " + " ".join(names[i : i + _TERMS_PER_LINE]) for i in range(0, len(names), _TERMS_PER_LINE)]

    out = [
        f"\\ oven scheduling model: n={n} k={inst.k} a={a} l={l}",
        f"\\ weights p={weights.p} sc={weights.sc} t={weights.t}; obj_int = objective value",
        "Minimize",
        f" obj: {_expr(objective)}",
        "Subject To",
        *model.rows,
        "Bounds",
        *bounds,
        "General",
        *block(general),
        "Binary",
        *block(binary),
        "End",
    ]
    return "\n".join(out) + "\n"


def write_ilp(
    instance: Instance, path: Optional[Union[str, Path]], weights: ObjectiveWeights = DEFAULT_WEIGHTS
) -> str:
    text = export_ilp(instance, weights)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text
