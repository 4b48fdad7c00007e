"""
Unit tests for piecewise-linear distributions and school technologies.
"""

import numpy as np
import pytest

from fiscal_tiebout.market.distributions import DistributionSpec, PiecewiseLinearCdf
from fiscal_tiebout.market.technology import LogTechnology, PowerTechnology, get_technology


def test_uniform_cdf_ppf_pdf():
    d = DistributionSpec.uniform(2.0, 4.0, mass=0.5)
    assert d.cdf(3.0) == pytest.approx(0.25)
    assert d.cdf(10.0) == pytest.approx(0.5)
    assert d.cdf(0.0) == 0.0
    assert d.ppf(0.25) == pytest.approx(3.0)
    assert d.pdf(3.0) == pytest.approx(0.25)
    assert d.pdf(5.0) == 0.0


def test_point_mass_is_an_atom():
    d = DistributionSpec.point(0.5, mass=0.5)
    curve = d.curve
    assert curve.cdf(0.5) == pytest.approx(0.5)
    assert curve.cdf_left(0.5) == pytest.approx(0.0)
    assert curve.atom(0.5) == pytest.approx(0.5)
    assert d.is_atomic


def test_piecewise_knots_scale_with_mass():
    d = DistributionSpec.piecewise([(0.0, 0.0), (0.5, 0.8), (1.0, 1.0)], mass=0.5)
    assert d.cdf(0.5) == pytest.approx(0.4)
    assert d.ppf(0.4) == pytest.approx(0.5)


def test_pooled_measure_keeps_gaps_and_atoms():
    a = DistributionSpec.uniform(0.0, 1.0, 0.5).curve
    b = DistributionSpec.uniform(2.0, 3.0, 0.5).curve
    pooled = PiecewiseLinearCdf.pooled([a, b])
    assert pooled.mass == pytest.approx(1.0)
    assert pooled.cdf(1.5) == pytest.approx(0.5)
    assert pooled.pdf(1.5) == 0.0
    # the median sits at the bottom of the gap
    assert pooled.ppf(0.5) == pytest.approx(1.0)

    atoms = PiecewiseLinearCdf.pooled([DistributionSpec.point(0.5, 0.5).curve, DistributionSpec.point(0.5, 0.5).curve])
    assert atoms.atom(0.5) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": "uniform", "support": (1.0, 1.0)},
        {"kind": "point", "support": (0.0, 1.0)},
        {"kind": "piecewise_linear_cdf", "support": (0.0, 1.0), "knots": ((0.0, 0.0), (1.0, 0.9))},
        {"kind": "uniform", "support": (0.0, 1.0), "mass": 0.0},
    ],
)
def test_distribution_spec_validation(kwargs):
    with pytest.raises(ValueError):
        DistributionSpec(**kwargs)


def test_technology_registry_aliases():
    assert isinstance(get_technology(), LogTechnology)
    assert isinstance(get_technology("ln", alpha=0.2), LogTechnology)
    assert isinstance(get_technology("cobb-douglas", alpha=0.2, beta=0.5), PowerTechnology)
    with pytest.raises(ValueError, match="Unknown school technology"):
        get_technology("linear")


def test_technology_inverse_and_marginal_bound():
    for tech in (LogTechnology(alpha=0.1), PowerTechnology(alpha=0.1, beta=0.5)):
        e = np.array([0.0, 0.5, 3.0])
        assert np.allclose(tech.inverse(tech.value(e)), e)
        bound = tech.marginal_bound(0.01)
        assert tech.marginal(bound) == pytest.approx(0.01)
    assert np.isnan(LogTechnology().inverse(-1.0))


def test_technology_parameter_validation():
    with pytest.raises(ValueError):
        LogTechnology(alpha=0.0)
    with pytest.raises(ValueError):
        PowerTechnology(beta=1.5)
