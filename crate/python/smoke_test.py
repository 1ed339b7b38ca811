"""Smoke test for the pykernelcomp extension module.

Build and run from the repository root:

    cargo build --release -p kernelcomp-py
    cp target/release/libpykernelcomp.so python/pykernelcomp.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pykernelcomp as kc


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    hardy = kc.Space("hardy")
    close(hardy.kernel([0.5], [0.5]).real, 4.0 / 3.0, 1e-15)
    close(hardy.kernel_norm([0.6]), 1.25, 1e-15)
    assert kc.Space("hardy_polydisc:2").dim == 2

    phi = kc.Symbol("automorphism:0.5")
    close(abs(phi(0.5)), 0.0, 1e-15)

    close(kc.inner_norm(0.5), math.sqrt(3.0), 1e-15)
    close(kc.affine_norm(0.25, 0.25), 1.0352762, 1e-7)
    est = kc.norm_estimate(hardy, kc.Symbol("affine:0.25,0.25"), 256)
    assert est <= kc.affine_norm(0.25, 0.25) + 1e-9

    fwd, adj = kc.ratio_pair(0.5, 0.5)
    close(fwd, 0.6, 1e-15)
    close(adj, 0.75, 1e-15)

    m = kc.min_c(phi, "grid:8,16")
    assert 1.7 < m["c_min"] <= math.sqrt(3.0) + 1e-9, m

    cert = kc.psd_check(kc.Space("hardy_polydisc:2"), "random:50,42,2", weight="z1*z2")
    assert cert["verdict"] == "psd", cert

    assert kc.classify_adjoint(hardy, kc.Symbol("series:0,0,1"))["verdict"] == "not_composition"
    assert kc.classify_adjoint(hardy, kc.Symbol("affine:0.5,0"))["verdict"] == "is_composition"

    try:
        kc.Symbol("bogus")
    except ValueError:
        pass
    else:
        raise AssertionError("invalid symbol accepted")

    print("pykernelcomp smoke test: ok")


if __name__ == "__main__":
    main()
