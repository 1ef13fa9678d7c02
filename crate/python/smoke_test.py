"""Smoke test for the walsh_hardness Python module.

Build and install first:

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import math

import walsh_hardness as wh


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    # f(x) = 3 + x0 - 2*x1 over table index x0 + 2*x1.
    table = [3.0, 4.0, 1.0, 2.0]
    coeffs = wh.walsh_transform(table)
    assert [abs(c) for c in coeffs] == [2.5, 0.5, 1.0, 0.0], coeffs
    assert coeffs == wh.walsh_transform(table, fast=False)

    p = wh.Problem("trap:12:3")
    assert p.n == 12 and p.k == 3 and p.f_max == 12.0
    assert p.evaluate([1] * 12) == 12.0
    assert p.global_optima() == [[1] * 12]
    dep, ind = p.canonical_pairs()
    assert close(abs(wh.estimate_coefficient(p, list(dep))), 0.5)
    assert close(wh.estimate_coefficient(p, list(ind)), 0.0)
    assert close(wh.schema_average(wh.Problem("trap:3:3"), "***"), 1.0)

    m = wh.compute_metrics(p, samples=2000, reps=5, estimator="exact")
    assert close(m["m1"], 0.5 / 12, 1e-12), m
    onemax = wh.compute_metrics(wh.Problem("onemax:8"), samples=500, reps=3)
    assert onemax["m1"] is None and close(onemax["fdc"], -1.0)

    run = wh.run_eda(wh.Problem("onemax:8"), "ecga", 200, seed=1)
    assert run["success"] and run["fitness_calls"] >= 200

    sized = wh.bisect(p, "ecga", initial=16, successes=5, seed=0)
    assert sized["min_bound"] <= sized["population_size"] <= sized["max_bound"]

    assert close(wh.pearson([1, 2, 3, 4], [1, 3, 2, 4]), 0.8)
    assert close(wh.kendall_tau([1, 2, 3], [1, 3, 2]), 1 / 3)

    try:
        wh.Problem("trap:7:3")
    except ValueError:
        pass
    else:
        raise AssertionError("invalid spec accepted")

    print("smoke test passed:", p, "m1 =", m["m1"], "N* =", sized["population_size"])
    assert not math.isnan(m["m2"])


if __name__ == "__main__":
    main()
