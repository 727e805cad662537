"""Smoke test for the policysim Python module.

Build and load the extension first:

    cargo build --release -p policysim-py --features extension-module
    cp target/release/libpolicysim_py.so python/policysim.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import policysim  # noqa: E402


def main():
    scenario = policysim.Scenario.default()
    assert scenario.validate() == []
    assert (scenario.n, scenario.seed) == (150, 42)

    table = scenario.generate()
    assert len(table) == 150
    assert {"X3", "M1", "Y1", "MOD2"} <= set(table.columns)
    assert scenario.quality_gate(table)["passed"]

    again = policysim.Scenario.from_json(scenario.to_json()).generate()
    assert again.to_csv() == table.to_csv()

    fit = policysim.ols(table, "Y2", ["X2", "M2", "X6"])
    assert 0.3 < fit["r2"] < 0.8, fit["r2"]

    logit = policysim.logit(table, "Y1", ["X3", "M1", "X6"])
    assert logit["converged"]

    cols = [table.column(c) for c in ["X3", "M1", "X6"]]
    b0, *b = logit["coefficients"]
    eta = [b0 + sum(w * v[i] for w, v in zip(b, cols)) for i in range(len(table))]
    auc = policysim.roc_auc(eta, table.column("Y1"))
    assert 0.5 < auc <= 1.0

    kept, vif = policysim.vif_prune(table, ["X1", "X2", "X3", "X4", "X5", "X6"])
    assert kept == ["X1", "X2", "X3", "X4", "X5", "X6"], vif

    med = policysim.mediation(table, "X3", "M1", "Y1", controls=["X6"], binary=True, resamples=500)
    lo, hi = med["bootstrap"]["lower"], med["bootstrap"]["upper"]
    assert lo <= med["indirect"] <= hi

    mod = policysim.moderation(table, "X3", "MOD1", "M1")
    assert len(mod["simple_slopes"]) == 3

    xs = [float(i) for i in range(20)]
    exact = policysim.Table.from_dict({"x": xs, "y": [2.0 * x + 1.0 for x in xs]})
    coef = policysim.ols(exact, "y", ["x"])["coefficients"]
    assert all(math.isclose(a, b, abs_tol=1e-9) for a, b in zip(coef, [1.0, 2.0])), coef

    report = policysim.run_pipeline(resamples=300)
    assert report["quality"]["passed"]
    assert [m["name"] for m in report["models"]["fits"]][:1] == ["Y2 model"]

    try:
        policysim.ols(table, "Y2", ["nope"])
    except ValueError as e:
        assert "nope" in str(e)
    else:
        raise AssertionError("unknown column accepted")

    print("python smoke test passed: AUC %.3f, indirect %.3f" % (auc, med["indirect"]))


if __name__ == "__main__":
    main()
