"""Smoke test for the sasc_py extension module.

Build and install first, e.g. `maturin develop --release -m crates/python/Cargo.toml`.
"""

import math
import os
import sys
import tempfile

import sasc_py


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    assert sasc_py.soft_threshold([3.0, -0.5, -2.0], 1.0) == [2.0, 0.0, -1.0]
    p = sasc_py.project_hyperplane([0.0, 0.0], [1.0, 1.0], 2.0)
    assert close(p[0], 1.0) and close(p[1], 1.0)

    band = sasc_py.SetProjector.interval(-0.2, 0.2)
    value, grad = band.moreau_grad([2.0], 1.0)
    assert close(value, 1.62) and close(grad[0], 1.8)

    slacks = sasc_py.schedule_check(1, 2, 2.0, 1.0, smax=40)
    assert min(slacks.values()) >= -1e-9, slacks
    c = sasc_py.rate_constants(1, 4, 2.0, 0.5, y_star_norm=1.0, sigma_f=1.0)
    assert close(c["C1"], math.sqrt(8) / 1.5) and close(c["C3"], 6.0)
    d = sasc_py.rate_constants(2, 4, 2.0, 0.5)
    assert close(d["D3"], 16.0)

    bp = sasc_py.BasisPursuit(d=50, n=20000, sparsity=5, rho=0.9, seed=0)
    x, trace = bp.solve(passes=2.0, checkpoint_every=1000)
    err = math.dist(x, bp.x_star) / math.hypot(*bp.x_star)
    assert err <= 0.1, err
    assert len(trace) == len(trace.samples) and trace.feasibility[-1] <= 0.05
    assert trace.samples == sorted(trace.samples)

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "trace.csv")
        trace.to_csv(path)
        back = sasc_py.Trace.from_csv(path)
        assert back.feasibility == trace.feasibility

        ds = sasc_py.Dataset.separable(20, 500, margin=0.5, seed=1)
        svm_path = os.path.join(tmp, "train.svm")
        with open(svm_path, "w") as f:
            f.write(ds.to_libsvm())
        train = sasc_py.Dataset.from_libsvm(svm_path)
        assert len(train) == 500 and train.to_libsvm() == ds.to_libsvm()

    w, _, peg = train.pegasos(1.0 / len(train), 20000, seed=0)
    assert train.error_rate(w) < 0.05 and len(peg) == 20
    w, svm_trace = train.solve_svm(samples=100000)
    assert train.error_rate(w) < 0.05
    assert svm_trace.feasibility[-1] < svm_trace.feasibility[0]

    try:
        sasc_py.SetProjector.interval(1.0, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("empty interval accepted")

    print(f"ok: bp relative error {err:.2e}, svm feasibility {svm_trace.feasibility[-1]:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
