"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

ibnls = pytest.importorskip("ibnls")


def test_classify_verdict():
    v = ibnls.classify(3, 1, 1, 2)
    assert v["applies"] is True
    assert v["criticality"] == "subcritical"
    assert {c["name"] for c in v["checks"]} >= {"s_range", "b_range", "sigma_subcritical"}

    bad = ibnls.classify(3, 1, 3, 2)
    assert bad["applies"] is False


def test_certify_verify_roundtrip():
    cert = ibnls.certify(3, "1", "1", "2")
    assert len(cert["sub"]) == 4
    assert all(row["pass"] for sub in cert["sub"] for row in sub["constraints"])
    report = ibnls.verify(cert)
    assert report["ok"] is True

    # tampering theta must fail verification
    cert["sub"][0]["theta"] = "0/1"
    assert ibnls.verify(cert)["ok"] is False


def test_closed_form_pairs():
    cert = ibnls.certify(3, "0", "1", "1")
    ext = cert["sub"][3]
    assert ext["pairs"]["a4"] == {"p": "8/1", "q": "3/1"}
    assert ext["theta"] == "5/8"


def test_sweep_small():
    res = ibnls.sweep(10, seed=5)
    assert res["verified"] == 10


def test_mode_propagation_phase():
    n, L = 64, math.pi
    u = ibnls.mode_field(1, n, L, 3)
    v = ibnls.linear_propagate(u, L, 0.1)
    expected = np.exp(1j * 8.1) * u
    assert np.max(np.abs(v - expected)) < 1e-12


def test_mass_conservation_short_run():
    n, L = 128, 16.0
    u = ibnls.gaussian_field(1, n, L)
    assert abs(ibnls.mass(u, L) - math.sqrt(math.pi / 2)) < 1e-10
    out = ibnls.evolve(u, L, 1.0, 2.0, 0.5, dt=1e-4, T=5e-3, stride=10)
    assert not out["blow_up"]
    m = np.asarray(out["mass"])
    assert np.max(np.abs(m - m[0]) / m[0]) < 1e-10


def test_picard_contracts():
    n, L = 128, 16.0
    u = ibnls.gaussian_field(1, n, L)
    out = ibnls.picard(u, L, 1.0, 2.0, 0.5, T=1e-2, m_nodes=17)
    assert out["converged"]
    assert all(r < 1 for r in out["ratios"])


def test_scaling_norm_factor():
    n, L = 256, 16.0
    u = ibnls.gaussian_field(1, n, L)
    scaled, newL = ibnls.scaling_transform(u, L, 2.0, 1, "1", "1/2", "2")
    assert newL == L / 2
    factor = ibnls.sobolev_norm(scaled, newL, 1.0, True) / ibnls.sobolev_norm(u, L, 1.0, True)
    assert abs(factor - 2.0 ** 2.25) < 1e-8
