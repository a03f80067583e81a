"""End-to-end smoke tests for the python surface."""

import json

import pytest

import ipskit


@pytest.fixture(scope="module")
def epidemic():
    return ipskit.model_epidemic("3/10", "3/10", "1/10", "1/2", M=2, d=1)


def test_model_text_round_trips_through_validation(epidemic):
    report = ipskit.validate_model(epidemic)
    assert report["ok"] is True
    assert report["issues"] == []


def test_epidemic_certifies_attractive(epidemic):
    cert = ipskit.certify_attractive(epidemic)
    assert cert["verdict"] == "Ordered"
    assert cert["families_checked"] > 0


def test_bad_labeling_yields_the_known_witness():
    bad = ipskit.model_two_type_contact("1/1", "1/1", [0, 1, 2])
    cert = ipskit.certify_attractive(bad)
    assert cert["verdict"] == "NotOrdered"
    w = cert["witness"]
    assert (w["alpha"], w["beta"], w["gamma"], w["delta"]) == (2, 0, 2, 1)
    assert w["lhs"] == "2/1" and w["rhs"] == "0/1"

    good = ipskit.model_two_type_contact("1/1", "1/1", [1, 0, 2])
    assert ipskit.certify_attractive(good)["verdict"] == "Ordered"


def test_checker_and_oracle_agree(epidemic):
    bad = ipskit.model_two_type_contact("1/1", "1/1", [0, 1, 2])
    assert ipskit.oracle_increasing_sets(epidemic, epidemic, p="1/2")["ordered"]
    assert not ipskit.oracle_increasing_sets(bad, bad)["ordered"]


def test_cluster_order_depends_on_parameter_domination():
    small = ipskit.model_tuberculosis("1/1", "1/1", M=2)
    large = ipskit.model_tuberculosis("2/1", "2/1", M=3)
    assert ipskit.certify_order(small, large)["verdict"] == "Ordered"
    assert ipskit.certify_order(large, small)["verdict"] == "NotOrdered"


def test_coupling_table_marginals_sum_exactly(epidemic):
    table = ipskit.coupling_table(epidemic, epidemic, (0, 0, 1, 0), p="1/2")
    assert table["quadruple"] == [0, 0, 1, 0]
    from fractions import Fraction

    lower_birth = sum(
        (Fraction(t["rate"]) for t in table["terms"]
         if t["lower"]["kind"] == "birth"),
        Fraction(0),
    )
    # additions on (0,0) are the seeding term gamma = 1/10, at weight 1/2
    assert lower_birth == Fraction(1, 20)


def test_ergodic_report_threshold_and_search():
    rep = ipskit.ergodic_report("3/10", "3/10", "0/1", "1/2", M=2)
    assert rep["threshold"] == "1/3"
    assert rep["ergodic"] is True
    assert rep["epsilon_found"] is not None
    assert all(json.loads("1") for _ in rep["u"])  # u list is populated

    hot = ipskit.ergodic_report("2/5", "0/1", "0/1", "1/2", M=2)
    assert hot["ergodic"] is False and hot["reason"] == "threshold"


def test_coupled_simulation_preserves_order(epidemic):
    run = ipskit.simulate_coupled(
        epidemic, epidemic, d=1, L=30, init_lower="all-0", init_upper="all-max",
        seed=7, events=5000,
    )
    assert run["order_violations"] == 0
    assert run["events"] == 5000
    assert all(a <= b for a, b in zip(run["final_lower"], run["final_upper"]))
    assert run["trace"][-1]["rho"] < run["trace"][0]["rho"]


def test_single_simulation_is_reproducible(epidemic):
    a = ipskit.simulate_single(epidemic, d=1, L=20, init="all-max", seed=3,
                               t_max=2.0)
    b = ipskit.simulate_single(epidemic, d=1, L=20, init="all-max", seed=3,
                               t_max=2.0)
    assert a["final_lower"] == b["final_lower"]
    assert a["events"] == b["events"]


def test_cli_in_process(tmp_path, epidemic):
    path = tmp_path / "epidemic.toml"
    path.write_text(epidemic)
    code, out, err = ipskit.cli(["certify-attractive", "--model", str(path)])
    assert code == 0
    assert json.loads(out)["verdict"] == "Ordered"

    code, out, _ = ipskit.cli(["ergodic", "--model", str(path)])
    assert code == 0
    assert json.loads(out)["threshold"] == "1/3"
