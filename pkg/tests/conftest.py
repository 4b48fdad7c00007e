"""
Global pytest fixtures for the fiscal_tiebout test suite.

Responsibilities:
    - Provide small, fully specified economies (uniform, symmetric, default,
      all-renter, homogeneous-housing, dominance) for unit and integration tests
    - Provide a small referendum-panel parameter set that runs in well under a second
    - Provide a fresh click command tree via the CLI factory, plus a scenario writer

Why a CLI factory?
    Using `create_cli()` gives every test a new command group, so option state
    never leaks between invocations.

LLM Prompt Example:
    "Show how to structure pytest fixtures that build immutable model inputs
    once and share them across unit and integration tests."
"""

from pathlib import Path

import pytest
from click.testing import CliRunner

from fiscal_tiebout.cli.app import create_cli
from fiscal_tiebout.econ.utility import UtilitySpec
from fiscal_tiebout.market.distributions import DistributionSpec
from fiscal_tiebout.market.economy import District, Economy
from fiscal_tiebout.market.technology import LogTechnology
from fiscal_tiebout.rdd.panel import PanelParams

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"


def _district(id, lo=0.0, hi=1.0, mass=0.5, **kw) -> District:
    if lo == hi:
        housing = DistributionSpec.point(lo, mass)
    else:
        housing = DistributionSpec.uniform(lo, hi, mass)
    return District(id=id, housing=housing, **kw)


@pytest.fixture
def uniform_economy() -> Economy:
    """
    Incomes U(0, 1), two districts with housing U(0, 1) of mass 1/2 each.

    The poorest type holds a PDV of 1 so lifetime wealth stays positive.
    """
    return Economy(
        districts=(_district("A"), _district("B")),
        income=DistributionSpec.uniform(0.0, 1.0),
        utility=UtilitySpec("log"),
        r=0.05,
        technology=LogTechnology(alpha=0.1),
        theta=0.5,
        outside_pdv=1.0,
    )


@pytest.fixture
def symmetric_economy() -> Economy:
    """Two identical owner-occupied districts, incomes U(5, 15)."""
    return Economy(districts=(_district("A"), _district("B")))


@pytest.fixture
def staggered_economy() -> Economy:
    """
    Two owner-occupied districts with shifted housing, A on U(0, 0.7) and B on
    U(0.3, 1). Their lowest and highest locations tie only when B outspends A by a
    factor of about twenty.
    """
    return Economy(districts=(_district("A", 0.0, 0.7), _district("B", 0.3, 1.0)))


@pytest.fixture
def default_economy() -> Economy:
    """Three overlapping owner-occupied districts, as in scenarios/default.toml."""
    third = 1.0 / 3.0
    return Economy(
        districts=(
            _district("A", 0.0, 0.6, third),
            _district("B", 0.2, 0.8, third),
            _district("C", 0.4, 1.0, third),
        )
    )


@pytest.fixture
def renter_economy() -> Economy:
    """Two identical districts in which every home is rented; school weight 0.1."""
    return Economy(
        districts=(_district("A", renter_share=1.0), _district("B", renter_share=1.0)),
        theta=0.1,
    )


@pytest.fixture
def dominance_economy() -> Economy:
    """District A's homes all beat district B's, whatever the schools."""
    return Economy(districts=(_district("A", 0.8, 1.0), _district("B", 0.0, 0.2)))


@pytest.fixture
def homogeneous_economy() -> Economy:
    """Every home in both districts has quality 1/2."""
    return Economy(districts=(_district("A", 0.5, 0.5), _district("B", 0.5, 0.5)))


@pytest.fixture
def panel_params() -> PanelParams:
    """
    A small planted-effect panel: 400 municipalities over 12 years.

    LLM Prompt Example:
        "Illustrate a fixture that keeps a simulation small enough for unit
        tests but large enough that every estimator has data on both sides."
    """
    return PanelParams(n_munis=400, n_years=12, propensity=0.4, kappa=0.05, beta1=2.0).validate()


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def cli():
    """
    Provide a fresh command tree built by the CLI factory.

    Notes:
        - Each test gets its own click.Group, so no command state is shared.
    """
    return create_cli()


@pytest.fixture
def write_scenario(tmp_path):
    """Write TOML text to a scenario file under tmp_path and return its path."""

    def _write(text: str, name: str = "scenario.toml") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR
