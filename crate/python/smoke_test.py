"""Smoke test for the Python bindings.

Run after `maturin develop -m crates/python/Cargo.toml`, or with the built
library copied onto the path as `mcsv.so`:

    cargo build --release -p mcsv-python
    cp target/release/libmcsv_py.so python/mcsv.so
    python3 python/smoke_test.py
"""

import mcsv

inst = mcsv.Instance([[1, 1, 1], [-1, -1, -1]], "1/2")
assert len(inst) == 2 and inst.dim == 3
assert inst.threshold() == (0, 1)
out = mcsv.dp_solve(inst)
assert out["feasible"] and out["cardinality"] == 2, out
assert out["layer_sizes"] == [2, 3]
assert inst.is_feasible(out["indices"])
assert inst.spread_identity([0]) == "0"

g = mcsv.generate("S2", seed=7, n=12, q=2)
dp = mcsv.dp_solve(g)
bf = mcsv.brute_solve(g)
assert dp["cardinality"] == bf["cardinality"], (dp, bf)
assert mcsv.dp_solve(g, backend="sparse")["cardinality"] == dp["cardinality"]
assert mcsv.Instance.from_text(g.to_text()).vectors == g.vectors

red, truth = mcsv.reduce_x3c(2, [(1, 2, 3), (1, 4, 5), (2, 4, 6)])
assert truth is False and not mcsv.dp_solve(red)["feasible"]
red, truth = mcsv.reduce_x3c(2, [(1, 2, 3), (4, 5, 6)])
assert truth is True and mcsv.dp_solve(red)["feasible"]

model = mcsv.emit_model(inst)
assert "Binary" in model and "x2" in model
assert mcsv.check_solution(inst, "x1 1\nx2 1\n")["cardinality"] == 2
try:
    mcsv.check_solution(inst, "x1 0\nx2 0\n")
    raise AssertionError("empty assignment accepted")
except ValueError:
    pass

q = mcsv.quantize([[0.25, -0.15], [1.0, 0.04]], "1/3", scale=10)
assert q.vectors == [[2, -2], [10, 0]]
try:
    mcsv.Instance([[1]], "3/2")
    raise AssertionError("alpha outside (0, 1) accepted")
except ValueError:
    pass

print("python smoke test passed")
