"""Acceptance criteria. Each test records one PASS/FAIL line that is repeated
in the terminal summary."""

import itertools
import time
from fractions import Fraction

import numpy as np

from helpers import (
    MUTATION_PARAMS,
    MUTATIONS,
    feasible_base,
    heuristic_family,
    osp_star_optimum,
    small_family,
)
from osp.bounds import UnitJobInterval, bound_report, gac_plus
from osp.errors import Unschedulable
from osp.formats import parse_instance, parse_schedule, serialize_instance, serialize_schedule, instance_hash
from osp.gen import GeneratorParams, generate, sample_grid
from osp.heuristic import construct
from osp.solve import Status, branch_and_bound, brute_force
from osp.validate import validate_schedule

SIX_JOB_OPTIMUM = 260  # obj_int of the six-job example, fixed after the first exhaustive run


def test_criterion_01_golden_bounds(example10, acceptance):
    t0 = time.perf_counter()
    report = bound_report(example10)
    elapsed = time.perf_counter() - t0
    a1, a2 = report.per_attribute
    checks = [
        (report.batch_count_lb, report.proc_time_lb, report.setup_cost_lb, report.tardy_lb) == (8, 158, 68, 7),
        Fraction(70658, 10**5) <= report.obj_lb <= Fraction(70659, 10**5),
        (a1.b_E, a1.b_C, a1.large_proc, a1.p_E, a1.p_C) == (2, 1, 0, 38, 19),
        (a2.large_count + a2.b_E, a2.large_count + a2.b_C, a2.large_proc, a2.p_E, a2.p_C) == (6, 6, 59, 60, 61),
        report.simple_cap_sum == 6,
        elapsed < 1,
    ]
    acceptance(1, all(checks), f"obj_lb={float(report.obj_lb):.6f} in {elapsed:.3f}s")
    assert all(checks)


def test_criterion_02_ten_job_optimum(example10, acceptance):
    expected_real = (Fraction(4 * 158, 18 * 10) + Fraction(72, 100) + Fraction(800, 10)) / 105
    t0 = time.perf_counter()
    bf = brute_force(example10)
    t_bf = time.perf_counter() - t0
    t0 = time.perf_counter()
    bb = branch_and_bound(example10, time_limit=60)
    t_bb = time.perf_counter() - t0
    ok = all(
        r.status is Status.OPTIMAL and (r.obj.p, r.obj.sc, r.obj.t) == (158, 72, 8) and r.obj.obj_real == expected_real
        for r in (bf, bb)
    )
    ok = ok and bf.obj.obj_decimal == "0.802201" and t_bf < 600 and t_bb < 60
    acceptance(2, ok, f"obj={bb.obj.obj_decimal} brute force {t_bf:.1f}s, branch and bound {t_bb:.1f}s")
    assert ok


def test_criterion_03_six_job_optimum(example6, acceptance):
    t0 = time.perf_counter()
    result = brute_force(example6, all_optima=True)
    elapsed = time.perf_counter() - t0
    sizes = sorted({len(s.batches) for s in result.optima})
    ok = result.status is Status.OPTIMAL and result.obj.obj_int == SIX_JOB_OPTIMUM and 3 in sizes and elapsed < 60
    acceptance(3, ok, f"obj_int={result.obj.obj_int}, optimal batch counts {sizes}")
    assert ok


def test_criterion_04_and_06_oracle_equivalence_and_soundness(acceptance):
    t0 = time.perf_counter()
    mismatches, violations, compared, infeasible = [], [], 0, 0
    for params, inst in small_family():
        bf = brute_force(inst)
        bb = branch_and_bound(inst, time_limit=None)
        if bf.status != bb.status or (bf.obj and bf.obj.obj_int != bb.obj.obj_int):
            mismatches.append(params.seed)
        if bf.status is not Status.OPTIMAL:
            infeasible += 1
            continue
        compared += 1
        report = bound_report(inst)
        opt = bf.obj
        if not (
            report.batch_count_lb <= len(bf.schedule.batches)
            and report.proc_time_lb <= opt.p
            and report.setup_cost_lb <= opt.sc
            and report.tardy_lb <= opt.t
            and report.obj_lb <= opt.obj_real
        ):
            violations.append(params.seed)
    elapsed = time.perf_counter() - t0
    ok4 = not mismatches and elapsed < 900
    acceptance(4, ok4, f"{len(mismatches)} mismatches over 100 instances ({infeasible} infeasible) in {elapsed:.1f}s")
    acceptance(6, not violations, f"{len(violations)} bound violations over {compared} solved instances")
    assert ok4 and not violations


def test_criterion_05_gac_plus_optimality(acceptance):
    t0 = time.perf_counter()
    windows = [(lo, hi) for lo in range(1, 5) for hi in range(lo, 5)]
    checked, wrong = 0, []
    for size in range(1, 8):
        for combo in itertools.combinations_with_replacement(windows, size):
            for c in (1, 2, 3):
                count, total, _ = gac_plus([UnitJobInterval(lo, hi) for lo, hi in combo], c)
                if (count, total) != osp_star_optimum(combo, c):
                    wrong.append((combo, c))
                checked += 1
    elapsed = time.perf_counter() - t0
    ok = not wrong and elapsed < 300
    acceptance(5, ok, f"{checked} multisets and capacities, {len(wrong)} non-optimal, {elapsed:.1f}s")
    assert ok


def test_criterion_07_and_08_heuristic_and_bound_speed(acceptance):
    failures, slowest, slowest_bound, count = [], 0.0, 0.0, 0
    for params, inst in heuristic_family():
        count += 1
        t0 = time.perf_counter()
        try:
            sched = construct(inst)
            feasible = validate_schedule(inst, sched).feasible
        except Unschedulable:
            feasible = False
        elapsed = time.perf_counter() - t0
        slowest = max(slowest, elapsed)
        if not feasible or elapsed >= 6:
            failures.append((params.n, params.seed))
        if params.n == 100:
            t0 = time.perf_counter()
            bound_report(inst)
            slowest_bound = max(slowest_bound, time.perf_counter() - t0)
    acceptance(7, not failures and count == 80, f"{count} instances, {len(failures)} failures, slowest {slowest:.3f}s")
    acceptance(8, slowest_bound < 2, f"slowest bound_report on n=100: {slowest_bound:.3f}s")
    assert not failures and count == 80 and slowest_bound < 2


def test_criterion_09_mutation_suite(acceptance):
    wrong = []
    for seed in range(100):
        inst = generate(GeneratorParams(**MUTATION_PARAMS, seed=seed))
        base = feasible_base(inst)
        if not validate_schedule(inst, base).feasible:
            wrong.append((seed, "base"))
            continue
        for code, mutate in MUTATIONS.items():
            inst2, sched2 = mutate(inst, base, np.random.default_rng(seed))
            if validate_schedule(inst2, sched2).codes != {code}:
                wrong.append((seed, code.value))
    acceptance(9, not wrong, f"{len(MUTATIONS)} codes x 100 seeds, {len(wrong)} wrong")
    assert not wrong


def test_criterion_10_round_trip(acceptance):
    rng = np.random.default_rng(10)
    broken = []
    for seed in range(1000):
        inst = generate(sample_grid(rng, n=int(rng.integers(1, 31)), seed=seed))
        text = serialize_instance(inst)
        again = parse_instance(text)
        if again != inst or serialize_instance(again) != text:
            broken.append((seed, "instance"))
        try:
            sched = construct(inst)
        except Unschedulable as exc:
            sched = exc.partial
        ref = instance_hash(inst)
        stext = serialize_schedule(sched, ref)
        parsed, ref2 = parse_schedule(stext)
        if (parsed, ref2) != (sched, ref) or serialize_schedule(parsed, ref2) != stext:
            broken.append((seed, "schedule"))
    acceptance(10, not broken, f"1000 instances and schedules, {len(broken)} not byte-identical")
    assert not broken
