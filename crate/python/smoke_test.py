#!/usr/bin/env python3
"""Smoke test for the nltm_py extension module.

Builds a small grid and potential, assembles a transfer matrix, computes
a scattering amplitude, and runs two certificates. Run after
`cargo build -p nltm-py` (or `--release`):

    python3 python/smoke_test.py
"""

import math
import pathlib
import shutil
import sys
import tempfile


def load_module():
    root = pathlib.Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / "release" / "libnltm_py.so",
        root / "target" / "debug" / "libnltm_py.so",
    ]
    for so in candidates:
        if so.exists():
            tmp = pathlib.Path(tempfile.mkdtemp(prefix="nltm_py_"))
            shutil.copy(so, tmp / "nltm_py.so")
            sys.path.insert(0, str(tmp))
            import nltm_py

            return nltm_py
    raise SystemExit(
        "libnltm_py.so not found; run `cargo build -p nltm-py` first"
    )


def main():
    nltm = load_module()

    grid = nltm.Grid(1.0, 16)
    assert grid.n == 16
    assert all(-grid.k < p < grid.k for p in grid.nodes)
    assert all(w > 0 for w in grid.weights)
    assert abs(sum(grid.weights) - 2 * grid.k) < 1e-9
    print("grid: ok")

    pot = nltm.Potential("gauss-gauss", 1.0, 1.0 + 0.0j)
    assert pot.alpha == 1.0 and pot.sigma == 4.0
    v_center = pot.vtilde(0.0, 0.0)
    assert abs(v_center - math.sqrt(math.pi)) < 1e-12
    assert abs(pot.vtilde(3.0, 0.5)) <= pot.envelope(3.0)
    print("potential: ok")

    x_minus, x_plus, tail = nltm.truncation(pot, 1e-4)
    assert x_minus < -pot.alpha < pot.alpha < x_plus
    assert 0 < tail <= 1.01e-4
    print(f"truncation: ok (range [{x_minus:.1f}, {x_plus:.1f}])")

    tm = nltm.transfer(pot, grid, eps=1e-4)
    assert tm.t_norm() > 0.1
    mat = tm.t_matrix()
    assert len(mat) == 2 * grid.n and len(mat[0]) == 2 * grid.n
    print(f"transfer: ok (|T| = {tm.t_norm():.4f})")

    res = tm.scatter(0.3)
    assert res["residual"] <= 1e-10
    assert len(res["f"]) == len(res["theta"]) == 2 * grid.n
    assert all(
        abs(d - abs(f) ** 2) < 1e-12 for d, f in zip(res["dcs"], res["f"])
    )
    back = tm.scatter(math.pi, incidence="right")
    assert back["residual"] <= 1e-10
    print("scatter: ok")

    # evolution over a short interval agrees with the composed transfer
    t_part = nltm.evolve_t(pot, grid, -2.0, 2.0)
    assert len(t_part) == 2 * grid.n
    assert max(abs(z) for row in t_part for z in row) > 1e-3
    print("evolve: ok")

    xs = [[x] for x in (-2.0, -0.5, 0.0, 1.0, 2.5)]
    ok, margin = nltm.certify("generator-nilpotency", pot, grid, xs)
    assert ok, f"nilpotency margin {margin}"
    ok, margin = nltm.certify(
        "kernel-norm-envelope", pot, grid, [[1.0], [2.0], [5.0], [20.0]]
    )
    assert ok, f"envelope margin {margin}"
    ok, margin = nltm.certify(
        "hs-factor-product-bound", pot, grid, [[-1.0, 0.5], [-2.0, 0.0, 1.5]]
    )
    assert ok, f"product-bound margin {margin}"
    print("certificates: ok")

    print("smoke test passed")


if __name__ == "__main__":
    main()
