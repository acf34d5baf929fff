import math

import numpy as np
import pytest

import slablens as sl


def test_gamma_star():
    g = sl.gamma_star()
    assert abs(g["gamma_star"] - 0.9373) <= 5e-4
    assert g["lo"] <= g["gamma_star"] <= g["hi"]


def test_roots_bracket_gamma_star():
    gs = sl.gamma_star()["gamma_star"]
    p1, p2, status = sl.find_roots(0.5 * gs)
    assert status == "TwoRoots"
    assert 1 < p1 < p2
    assert abs(sl.g_zero(p2, 0.5 * gs)) < 1e-10 * (1 + p2 * p2)
    assert sl.find_roots(1.5 * gs)[2] == "NoRoots"


def test_field_map_matches_reconstruct():
    P = sl.Params.from_gamma(0.5 * sl.gamma_star()["gamma_star"], 1e-3)
    src = sl.Source.bump(1.2, 3.2)
    f = sl.field_map(-0.5, 2.0, 3, -1.0, 1.0, 3, src, P, threads=1)
    assert f.shape == (3, 3)
    assert f.dtype == np.complex128
    assert np.all(np.isfinite(f))
    assert abs(f[1, 2] - sl.reconstruct(0.75, 1.0, src, P)) <= 1e-12 * abs(f[1, 2])


def test_energy_and_errors():
    gs = sl.gamma_star()["gamma_star"]
    P = sl.Params.from_gamma(0.5 * gs, 1e-3)
    e = sl.energy(sl.Source.dipole(1.2, 1.0, 0.0), P, 1.0)
    assert e["total"] > 0
    assert math.isclose(e["total"], e["small_p"] + e["large_p"], rel_tol=1e-12)
    with pytest.raises(ValueError):
        sl.energy(sl.Source.dipole(1.2, 1.0, 0.0), P, 2.0)
    with pytest.raises(sl.RootStatusError):
        sl.Source.sinc_bust(sl.Params.from_gamma(1.5 * gs, 1e-3), 1.2, 3.2)


def test_cli_in_process():
    code, out, err = sl.run_cli(["gamma-star"])
    assert code == 0, err
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert rows[0] == "gamma_star,lo,hi,inner_max_s"
    assert 0.9368 <= float(rows[1].split(",")[0]) <= 0.9378
    assert sl.run_cli(["g-roots", "--delta", "-1"])[0] == 2
