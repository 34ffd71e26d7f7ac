import math

import numpy as np
import pytest

import fgt


def test_quadrature_tables():
    d0 = fgt.gauss_cutoff(1e-6)
    assert fgt.pw_params(1e-6, 1.0, 2 * d0).n_modes == 30
    assert fgt.periodic_params(1e-12, 1e-3).n_terms == 53
    q = fgt.pw_params(1e-10, 0.01, 3 * fgt.gauss_cutoff(1e-10), 2)
    assert abs(fgt.pw_kernel_eval(q, [0.05, -0.02]) - math.exp(-0.29)) < 1e-9


@pytest.mark.parametrize("boundary", ["free", "periodic"])
def test_point_transform(boundary):
    pts = fgt.gen_points("uniform-box", 2, 1500, seed=3)
    q = fgt.gen_charges(1500, seed=3)
    u, stats = fgt.fgt_points(pts, q, delta=1e-3, eps=1e-9, boundary=boundary)
    ref = fgt.direct_transform(pts, q, delta=1e-3, boundary=boundary)
    assert np.linalg.norm(u - ref) / np.linalg.norm(ref) < 1e-8
    assert stats["boxes"] >= 1


def test_box_transform():
    def one(x):
        return np.ones(len(x))

    sol = fgt.box_transform(one, dim=1, delta=0.01, eps=1e-12, k=10)
    x = sol.nodes()[:, 0]
    r = math.sqrt(0.01)
    exact = [math.sqrt(math.pi) * r / 2 * (math.erf((0.5 - t) / r) + math.erf((0.5 + t) / r)) for t in x]
    assert np.max(np.abs(sol.values() - exact)) < 1e-11
    assert sol.nodes().shape == (10, 1)
    assert sol.values().shape == (10,)


def test_nufft_single_point():
    f = fgt.nufft_type1(np.zeros((1, 2)), np.array([1.0 + 0j]), 12)
    assert np.allclose(f, 1.0)
