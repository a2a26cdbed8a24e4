"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary section at
the end lists every criterion with its measured runtime.
"""
from contextlib import contextmanager
import math
import random
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from degspec.dynamics import (conjugation_invariance_check, degree_inequalities, degree_sequence,
                              fekete_estimate, monomial_dynamical_degrees, stability_check)
from degspec.exact import QMatrix, spectral_radius
from degspec.intersection import (CycleClass, blowdown_pushforward, blowup_pullback, center_class,
                                  cone_contains, degree0, exceptional_class, fiber_class,
                                  hodge_signature, psef_difference)
from degspec.maps import MonomialMap, PolyMap, monomial_action_p1k
from degspec.models import builtin_catalog, make_model
from degspec.theorems import (CONCLUSION_VIOLATED, NOT_APPLICABLE, PASS, spectral_gap_for_map,
                              spectral_gap_report, threefold_duality_check)


@contextmanager
def criterion(n: int, title: str, limit: float):
    start = time.perf_counter()
    detail = {"text": ""}
    try:
        yield detail
        elapsed = time.perf_counter() - start
        assert elapsed < limit, f"runtime {elapsed:.2f}s exceeds {limit}s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        ACCEPTANCE_RESULTS[n] = ("FAIL", f"{title} ({elapsed:.2f}s): {exc}")
        print(f"criterion {n}: FAIL {title}")
        raise
    ACCEPTANCE_RESULTS[n] = ("PASS", f"{title} ({elapsed:.2f}s < {limit}s) {detail['text']}".rstrip())
    print(f"criterion {n}: PASS {title}")


def primitive_matrix(rng, k):
    """Nonnegative, nonsingular, with some power entrywise positive."""
    while True:
        A = [[rng.randint(0, 3) for _ in range(k)] for _ in range(k)]
        if round(np.linalg.det(np.array(A, dtype=float))) == 0:
            continue
        # Wielandt: primitive iff the ((k-1)^2 + 1)-th power is positive
        power = np.linalg.matrix_power(np.array(A, dtype=object), (k - 1) ** 2 + 1)
        if all(x > 0 for x in power.flat):
            return A


def random_unimodular(rng, steps=12):
    m = [[int(i == j) for j in range(3)] for i in range(3)]
    for _ in range(steps):
        i, j = rng.sample(range(3), 2)
        c = rng.choice([-2, -1, 1, 2])
        for t in range(3):
            m[i][t] += c * m[j][t]
        if rng.random() < 0.3:
            m[i], m[j] = m[j], m[i]
    return m


def test_criterion_01_blowup_identities():
    with criterion(1, "blowup identity suite", 1.0) as d:
        m = make_model("BlP3line")
        H, E, F, W = m["H"], exceptional_class(m), fiber_class(m), center_class(m)
        rng = random.Random(1)
        assert blowdown_pushforward(E * E) == -W
        for _ in range(100):
            a = rng.randint(-50, 50) * H + rng.randint(-50, 50) * E
            aF = degree0(a * F)
            assert blowup_pullback(blowdown_pushforward(a), m) == a + aF * E
            assert blowdown_pushforward(a * E) == aF * W
            diff, effective = psef_difference(m, a)
            assert diff == (aF * aF) * W and effective
        bp = make_model("BlP3pt")
        assert blowdown_pushforward(bp["E"] * bp["E"]).is_zero()
        d["text"] = "100 classes, exact"


def test_criterion_02_hodge_index():
    with criterion(2, "Hodge index on built-in models", 1.0) as d:
        names = [n for n in builtin_catalog() if make_model(n).dim >= 2]
        for name in names:
            m = make_model(name)
            assert hodge_signature(m) == (1, m.ranks[1] - 1, 0), name
        d["text"] = f"{len(names)} models"


def test_criterion_03_class_defect_on_product():
    with criterion(3, "pullback product defect is 2 h1h2", 1.0):
        m = make_model("P1xP1xK(2)")
        A = [[2, 1], [1, 1]]
        M1, M2 = monomial_action_p1k(A, 1), monomial_action_p1k(A, 2)
        fh1 = CycleClass(m, 1, M1.apply(m["h1"].coords))
        fh2 = CycleClass(m, 1, M1.apply(m["h2"].coords))
        fh12 = CycleClass(m, 2, M2.apply(m["h1h2"].coords))
        diff = fh1 * fh2 - fh12
        assert diff == 2 * m["h1h2"]
        assert cone_contains(m, 2, diff)


def test_criterion_04_cremona_periodicity():
    with criterion(4, "Cremona degrees [2,1,...]", 5.0):
        seq = degree_sequence(PolyMap.cremona(), 1, 8)
        assert list(seq.values) == [2, 1, 2, 1, 2, 1, 2, 1]


def test_criterion_05_fekete_vs_eigenvalue():
    with criterion(5, "growth estimate vs spectral radius", 10.0) as d:
        rng = random.Random(5)
        worst = 0.0
        for i in range(10):
            A = primitive_matrix(rng, 2 if i < 5 else 3)
            est = fekete_estimate(degree_sequence(MonomialMap(A), 1, 25))
            rho = spectral_radius(QMatrix(A).abs())
            rel = abs(est.window_slope - rho) / rho
            worst = max(worst, rel)
            assert rel <= 0.01, (A, est.window_slope, rho)
            assert est.upper_inf >= est.window_slope - 1e-9
            assert est.violations == ()
        d["text"] = f"worst relative error {worst:.2e}"


def test_criterion_06_instability_detection():
    with criterion(6, "rotation instability and sqrt(2) growth", 5.0) as d:
        f = MonomialMap([[1, -1], [1, 1]])
        assert stability_check(f, 1).first_failure == 2
        est = fekete_estimate(degree_sequence(f, 1, 30))
        assert est.window_slope == pytest.approx(math.sqrt(2), rel=0.02)
        d["text"] = f"slope {est.window_slope:.6f}"


def test_criterion_07_spectral_gap_verdicts():
    with criterion(7, "spectral gap verdicts", 1.0):
        fib = spectral_gap_report(QMatrix([[2, 1], [1, 1]]), r2=1)
        assert fib.verdict == PASS
        assert fib.r1 == pytest.approx(2.618034, abs=1e-6) and fib.spectrum[0].multiplicity == 1
        assert [e.modulus for e in fib.spectrum if e.modulus > 1] == [fib.r1]
        assert fib.spectrum[1].modulus == pytest.approx(0.381966, abs=1e-6)
        assert spectral_gap_for_map(MonomialMap([[2, 1], [1, 1]])).verdict == PASS
        assert spectral_gap_report(QMatrix.diagonal([2, 2]), r2=1).verdict == CONCLUSION_VIOLATED
        assert spectral_gap_report(QMatrix([[1, -1], [1, 1]]), r2=2).verdict == NOT_APPLICABLE


def test_criterion_08_threefold_duality():
    with criterion(8, "threefold duality and dichotomy", 10.0) as d:
        rng = random.Random(8)
        gaps = 0
        for _ in range(25):
            rep = threefold_duality_check(random_unimodular(rng))
            assert abs(rep.lambda1_inverse - rep.lambda2) / rep.lambda2 <= 1e-5
            if rep.lambda1 > 1 + 1e-6:
                gaps += 1
                assert (rep.lambda1 ** 2 > rep.lambda2 + 1e-6
                        or rep.lambda1_inverse ** 2 > rep.lambda2_inverse + 1e-6)
        d["text"] = f"{gaps} of 25 with lambda1 > 1"


def test_criterion_09_degree_inequalities():
    with criterion(9, "lambda1 * lambda_p >= lambda_(p+1) and class inequality", 5.0) as d:
        examples = [[[2, 1], [1, 1]], [[1, -1], [1, 1]], [[-1, 0], [0, -1]], [[2, 0], [0, 2]],
                    [[1, 0], [0, 1]], [[3, 1], [1, 0]],
                    [[0, 1, 0], [0, 0, 1], [1, 1, 0]], [[1, 1, 0], [0, 1, 1], [1, 0, 1]],
                    [[2, 1, 0], [1, 2, 1], [0, 1, 2]]]
        checks = 0
        for A in examples:
            f = MonomialMap(A)
            lam = monomial_dynamical_degrees(f)
            k = f.k
            for p in sorted({1, k - 1}):
                assert lam[1] * lam[p] >= lam[p + 1] - 1e-6, (A, p)
                checks += 1
            if k == 2:
                rep = degree_inequalities(f, 10)
                assert rep.class_checks and all(c.effective for c in rep.class_checks), A
                checks += len(rep.class_checks)
        d["text"] = f"{checks} checks"


def test_criterion_10_conjugation_invariance():
    with criterion(10, "growth invariant under linear conjugation", 10.0) as d:
        rng = random.Random(10)
        worst = 0.0
        done = 0
        while done < 5:
            g = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)]
            if QMatrix(g).det() == 0:
                continue
            rep = conjugation_invariance_check(PolyMap.cremona(), PolyMap.linear(g))
            assert rep.relative_difference <= 0.02, g
            worst = max(worst, rep.relative_difference)
            done += 1
        d["text"] = f"worst disagreement {worst:.2e}"
