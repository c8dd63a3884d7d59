import json
import math

import pytest

import codingtree as ct


def test_preset_catalog():
    names = ct.preset_names()
    assert "allen_cahn_1d" in names
    info = ct.preset_info("allen_cahn_1d")
    assert info["T"] == pytest.approx(0.3)
    assert info["reference"] == pytest.approx(-0.610639)


def test_allen_cahn_preset_within_three_standard_errors():
    r = ct.run_preset("allen_cahn_1d", samples=20000)
    assert r.ok()
    row = r.rows[0]
    assert abs(row.estimate - row.exact) <= 3 * row.std_error


def test_solve_matches_heat_kernel():
    # f = 0: u(0, x) = E[cos(x + W_T)] = cos(x) exp(-T/2).
    r = ct.solve("0", "cos(x)", T=0.5, x=[0.0, 1.0], samples=20000)
    for row in r.rows:
        exact = math.cos(row.x) * math.exp(-0.25)
        assert abs(row.estimate - exact) <= 3 * row.std_error + 1e-12


def test_results_are_reproducible_and_thread_invariant():
    a = ct.solve("z0 - z0^3", "0.5*cos(x)", T=0.3, grid="-1:1:3", samples=5000, threads=1)
    b = ct.solve("z0 - z0^3", "0.5*cos(x)", T=0.3, grid="-1:1:3", samples=5000, threads=3)
    assert [r.estimate for r in a.rows] == [r.estimate for r in b.rows]
    assert len(a.rows) == 3


def test_solve_dd_and_report_serialisation():
    r = ct.solve_dd("z0 - z0^3", "1/(2 + 2*q/5)", phi_form="radial", dim=100, sigma=math.sqrt(2), T=0.3,
                    samples=2000)
    assert r.ok()
    assert 0.04 < r.rows[0].estimate < 0.07
    csv = r.to_csv().splitlines()
    assert csv[0] == "run,t,x,estimate,std_error,samples,failed,mean_nodes,exact,abs_error,rel_error"
    assert json.loads(r.to_json())["rows"][0]["samples"] == 2000


def test_combinatorics_and_mechanisms():
    assert [len(ct.fdb_terms(1, k)) for k in range(1, 6)] == [1, 2, 3, 5, 7]
    assert sum(t["coefficient"] for t in ct.fdb_terms(1, 4)) == pytest.approx(15)
    assert len(ct.mechanism("Id", 0)) == 1
    assert ct.check_bounds(0.5, 3.0, 0.1) == "holds"


def test_cole_hopf_oracle_constant():
    value, se = ct.cole_hopf_oracle("1.5", 0.3, 0.0, 1000)
    assert value == pytest.approx(1.5)
    assert se == 0.0


def test_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        ct.solve("z0 +", "x")
    with pytest.raises(ValueError):
        ct.run_preset("allen_cahn_1d", alpha=2.0)
    with pytest.raises(ValueError):
        ct.solve_dd("0", "s", code="X")
