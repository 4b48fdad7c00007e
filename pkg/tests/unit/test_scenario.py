"""
Unit tests for scenario parsing and validation.

Covers:
    - every bundled scenario loads
    - field-level error messages for bad values, unknown keys and unknown districts
    - domain checks at load time (market clearing)
    - normalized form and config hash stability
    - policy objects built from the [policy] block
"""

import pytest

from fiscal_tiebout.cli.scenario import load_scenario, parse_scenario
from fiscal_tiebout.errors import ConfigValidationError


def _two_districts(**economy):
    return {
        "economy": {
            "districts": [{"id": "A"}, {"id": "B"}],
            **economy,
        }
    }


def test_bundled_scenarios_parse(scenario_dir):
    paths = sorted(scenario_dir.glob("*.toml"))
    assert paths
    for path in paths:
        cfg = load_scenario(path)
        if cfg.economy is not None:
            econ = cfg.to_economy()
            assert econ.n == len(cfg.economy.districts)
        if cfg.rdd is not None:
            assert cfg.rdd.panel_params().n_munis >= 2


def test_defaults_build_an_economy():
    econ = parse_scenario(_two_districts()).to_economy()
    assert econ.r == 0.05
    assert econ.districts[0].mass == pytest.approx(0.5)
    assert (econ.w_min, econ.w_max) == (5.0, 15.0)


def test_negative_rate_names_the_field():
    with pytest.raises(ConfigValidationError) as exc:
        parse_scenario(_two_districts(r=-0.01))
    assert "economy.r" in str(exc.value)


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigValidationError) as exc:
        parse_scenario({**_two_districts(), "solver": {"tolerance": 1e-3}})
    assert "solver.tolerance" in str(exc.value)


def test_unknown_district_in_policy():
    data = {**_two_districts(), "policy": {"caps": {"caps": {"Z": 1.0}}}}
    with pytest.raises(ConfigValidationError, match="unknown districts"):
        parse_scenario(data)


def test_housing_mass_must_match_income_mass():
    data = {
        "economy": {
            "districts": [
                {"id": "A", "housing": {"mass": 0.5}},
                {"id": "B", "housing": {"mass": 0.3}},
            ]
        }
    }
    with pytest.raises(ConfigValidationError):
        parse_scenario(data)


def test_starting_profiles_need_one_entry_per_district():
    with pytest.raises(ConfigValidationError, match="starting profiles"):
        parse_scenario({**_two_districts(), "solver": {"initial": [0.0]}})


def test_unknown_outcome_field_in_estimation():
    with pytest.raises(ConfigValidationError, match="unknown outcome field"):
        parse_scenario({"rdd": {"estimate": {"outcomes": ["population"]}}})


def test_invalid_dgp_is_reported():
    with pytest.raises(ConfigValidationError):
        parse_scenario({"rdd": {"dgp": {"n_munis": 1}}})


def test_missing_economy_block():
    cfg = parse_scenario({"rdd": {}})
    with pytest.raises(ConfigValidationError):
        cfg.to_economy()


def test_normalized_form_round_trips_to_same_hash():
    cfg = parse_scenario({**_two_districts(theta=0.7), "solver": {"seed": 3}})
    again = parse_scenario(cfg.normalized())
    assert again.config_hash() == cfg.config_hash()
    assert len(cfg.config_hash()) == 64


def test_hash_ignores_key_order_and_tracks_values():
    first = parse_scenario({"solver": {"seed": 1, "tol": 1e-5}, **_two_districts()})
    second = parse_scenario({**_two_districts(), "solver": {"tol": 1e-5, "seed": 1}})
    third = parse_scenario({**_two_districts(), "solver": {"tol": 1e-5, "seed": 2}})
    assert first.config_hash() == second.config_hash()
    assert first.config_hash() != third.config_hash()


def test_fee_policy_defaults_to_equal_weights():
    cfg = parse_scenario({**_two_districts(), "policy": {"fees": {"fee_rate": 0.2, "threshold": {"B": 1.0}}}})
    fees = cfg.fee_policy(cfg.to_economy())
    assert fees.transfer_weights == (0.5, 0.5)
    assert fees.threshold == (0.0, 1.0)
    assert fees.fee_rate == 0.2


def test_cap_policy_and_targets_by_id():
    cfg = parse_scenario({**_two_districts(), "policy": {"caps": {"caps": {"B": 0.4}, "targets": ["B"]}}})
    econ = cfg.to_economy()
    assert cfg.cap_policy(econ).caps == {1: 0.4}
    assert cfg.cap_targets(econ) == (1,)
    assert parse_scenario(_two_districts()).cap_targets(econ) == (0, 1)


def test_toml_syntax_error(write_scenario):
    path = write_scenario("[economy\nr = 0.05\n")
    with pytest.raises(ConfigValidationError):
        load_scenario(path)
