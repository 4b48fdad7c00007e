"""
Scenario files: TOML in, validated pydantic models out.

A scenario has four blocks:

    [economy]   districts, income distribution, utility, technology, r, theta,
                outside option, renter shares
    [solver]    tolerances, iteration caps, seed, starting profiles
    [policy]    caps / fees / floor settings
    [rdd]       panel generator parameters and estimation grids

Unknown keys are rejected everywhere. After field validation the economy is
built once, so every domain invariant (masses, supports, renter shares) is
checked at load time and reported as a field-level message.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..econ.utility import UtilitySpec
from ..errors import ConfigValidationError
from ..market.distributions import DistributionSpec
from ..market.economy import District, Economy
from ..market.technology import get_technology
from ..policy.instruments import CapPolicy, FeePolicy
from ..rdd.bandwidth import IkConstants
from ..rdd.panel import OUTCOME_FIELDS, PanelParams

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python < 3.11
    import tomli as tomllib


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ---------------------------------------------------------------------------
# economy
# ---------------------------------------------------------------------------
class DistributionModel(_Block):
    kind: Literal["uniform", "piecewise_linear_cdf", "point"] = "uniform"
    lo: float = 0.0
    hi: float = 1.0
    knots: List[Tuple[float, float]] = Field(default_factory=list)
    mass: Optional[float] = Field(default=None, gt=0)

    def to_spec(self, default_mass: float = 1.0) -> DistributionSpec:
        mass = self.mass if self.mass is not None else default_mass
        if self.kind == "uniform":
            return DistributionSpec.uniform(self.lo, self.hi, mass)
        if self.kind == "point":
            return DistributionSpec.point(self.lo, mass)
        return DistributionSpec.piecewise(self.knots, mass)


class UtilityModel(_Block):
    kind: Literal["log", "crra"] = "log"
    gamma: float = Field(default=2.0, gt=0)


class TechnologyModel(_Block):
    kind: str = "log"
    alpha: float = Field(default=0.1, gt=0)
    beta: Optional[float] = None

    def build(self):
        params = {"alpha": self.alpha}
        if self.beta is not None:
            params["beta"] = self.beta
        return get_technology(self.kind, **params)


class DistrictModel(_Block):
    id: str
    housing: DistributionModel = Field(default_factory=DistributionModel)
    renter_share: Union[float, List[Tuple[float, float]]] = 0.0
    old_wealth: Union[None, float, List[Tuple[float, float]]] = None
    s_scale: float = Field(default=1.0, gt=0)


class EconomyModel(_Block):
    districts: List[DistrictModel] = Field(min_length=1)
    income: DistributionModel = Field(default_factory=lambda: DistributionModel(lo=5.0, hi=15.0))
    utility: UtilityModel = Field(default_factory=UtilityModel)
    technology: TechnologyModel = Field(default_factory=TechnologyModel)
    r: float = Field(default=0.05, gt=0)
    theta: float = Field(default=0.5, ge=0)
    outside_money_value: Optional[float] = None
    outside_pdv: Optional[float] = 0.0

    def build(self) -> Economy:
        income = self.income.to_spec()
        share = income.mass / len(self.districts)
        districts = tuple(
            District(
                id=d.id,
                housing=d.housing.to_spec(share),
                renter_share=d.renter_share,
                old_wealth=d.old_wealth,
                s_scale=d.s_scale,
            )
            for d in self.districts
        )
        econ = Economy(
            districts=districts,
            income=income,
            utility=UtilitySpec(kind=self.utility.kind, gamma=self.utility.gamma),
            r=self.r,
            technology=self.technology.build(),
            theta=self.theta,
            outside_money_value=self.outside_money_value,
            outside_pdv=None if self.outside_money_value is not None else self.outside_pdv,
        )
        econ.check_masses()
        return econ


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------
class SolverSettings(_Block):
    damping: float = Field(default=0.5, gt=0, le=1)
    tol: float = Field(default=1e-6, gt=0)
    max_iter: int = Field(default=500, ge=1)
    xatol: float = Field(default=1e-9, gt=0)
    grid_nodes: int = Field(default=401, ge=3)
    seed: int = 0
    ic_samples: int = Field(default=10000, ge=0)
    initial: Optional[List[float]] = None
    starts: List[List[float]] = Field(default_factory=list)

    def game_kwargs(self) -> dict:
        return {
            "damping": self.damping,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "xatol": self.xatol,
            "initial": self.initial,
            "starts": self.starts,
            "nodes": self.grid_nodes,
        }


# ---------------------------------------------------------------------------
# policy
# ---------------------------------------------------------------------------
class CapsModel(_Block):
    targets: List[str] = Field(default_factory=list)
    caps: Dict[str, float] = Field(default_factory=dict)
    mode: Literal["fixed", "reoptimize"] = "fixed"
    n_grid: int = Field(default=8, ge=1)


class FeesModel(_Block):
    fee_rate: float = Field(default=0.0, ge=0, le=1)
    threshold: Union[float, Dict[str, float]] = 0.0
    transfer_weights: Optional[Dict[str, float]] = None


class FloorModel(_Block):
    n_grid: int = Field(default=8, ge=1)


class PolicyModel(_Block):
    caps: CapsModel = Field(default_factory=CapsModel)
    fees: FeesModel = Field(default_factory=FeesModel)
    floor: FloorModel = Field(default_factory=FloorModel)


# ---------------------------------------------------------------------------
# rdd
# ---------------------------------------------------------------------------
class DgpModel(_Block):
    n_munis: int = Field(default=500, ge=2)
    n_years: int = Field(default=12, ge=2)
    start_year: int = 1990
    propensity: float = Field(default=0.3, ge=0, le=1)
    multi_prob: float = Field(default=0.1, ge=0, le=1)
    margin_a: float = Field(default=2.0, gt=0)
    margin_b: float = Field(default=2.0, gt=0)
    kappa: float = 0.05
    beta1: float = 2.0
    psi: float = 0.0
    effect_duration: int = Field(default=1, ge=1)
    income_effect: float = 0.0
    confounding: float = 0.5
    underreport_prob: float = Field(default=0.0, ge=0, le=1)
    underreport_mode: Literal["random", "outcome"] = "random"


class EstimationModel(_Block):
    outcomes: List[str] = Field(default_factory=lambda: ["avg_tax", "home_value"])
    fuzzy_outcomes: List[str] = Field(default_factory=lambda: ["home_value"])
    treatment: str = "avg_tax"
    transform: Literal["growth", "pct", "level"] = "growth"
    lags: List[int] = Field(default_factory=lambda: list(range(5, 13)))
    min_side: int = Field(default=50, ge=2)
    bandwidth: Optional[float] = Field(default=None, gt=0)
    n_bins: int = Field(default=20, ge=1)
    neighbors: bool = True
    exclude_shared_school: bool = True
    ik_regularize: bool = True

    @model_validator(mode="after")
    def _known_fields(self):
        for name in [*self.outcomes, *self.fuzzy_outcomes, self.treatment]:
            if name not in OUTCOME_FIELDS:
                raise ValueError(f"unknown outcome field {name!r}; expected one of {list(OUTCOME_FIELDS)}")
        if any(k < 0 for k in self.lags):
            raise ValueError("lags must be nonnegative")
        return self

    def ik_constants(self) -> IkConstants:
        return IkConstants(regularize=self.ik_regularize)


class MonteCarloModel(_Block):
    replications: int = Field(default=200, ge=1)
    lag: int = Field(default=1, ge=0)


class RddModel(_Block):
    dgp: DgpModel = Field(default_factory=DgpModel)
    estimate: EstimationModel = Field(default_factory=EstimationModel)
    monte_carlo: MonteCarloModel = Field(default_factory=MonteCarloModel)
    seed: int = 0

    def panel_params(self) -> PanelParams:
        return PanelParams(**self.dgp.model_dump()).validate()


# ---------------------------------------------------------------------------
# scenario
# ---------------------------------------------------------------------------
class ScenarioConfig(_Block):
    name: str = "scenario"
    economy: Optional[EconomyModel] = None
    solver: SolverSettings = Field(default_factory=SolverSettings)
    policy: PolicyModel = Field(default_factory=PolicyModel)
    rdd: Optional[RddModel] = None

    @model_validator(mode="after")
    def _domain_invariants(self):
        if self.economy is not None:
            econ = self.economy.build()
            ids = {d.id for d in econ.districts}
            caps = self.policy.caps
            unknown = (set(caps.targets) | set(caps.caps)) - ids
            fees = self.policy.fees
            if isinstance(fees.threshold, dict):
                unknown |= set(fees.threshold) - ids
            if fees.transfer_weights is not None:
                unknown |= set(fees.transfer_weights) - ids
            if unknown:
                raise ValueError(f"policy block names unknown districts: {sorted(unknown)}")
            for profile in [self.solver.initial, *self.solver.starts]:
                if profile is not None and len(profile) != econ.n:
                    raise ValueError(f"starting profiles need {econ.n} entries")
            self.fee_policy(econ)
        if self.rdd is not None:
            self.rdd.panel_params()
        return self

    # -- domain objects -------------------------------------------------
    def to_economy(self) -> Economy:
        if self.economy is None:
            raise ConfigValidationError("scenario has no [economy] block")
        return self.economy.build()

    def cap_targets(self, econ: Economy) -> Tuple[int, ...]:
        targets = self.policy.caps.targets
        return tuple(econ.index(i) for i in targets) if targets else tuple(range(econ.n))

    def cap_policy(self, econ: Economy) -> CapPolicy:
        caps = {econ.index(k): v for k, v in self.policy.caps.caps.items()}
        return CapPolicy(caps=caps, mode=self.policy.caps.mode)

    def fee_policy(self, econ: Economy) -> FeePolicy:
        fees = self.policy.fees
        ids = [d.id for d in econ.districts]
        if isinstance(fees.threshold, dict):
            threshold = tuple(fees.threshold.get(i, 0.0) for i in ids)
        else:
            threshold = (float(fees.threshold),) * econ.n
        if fees.transfer_weights is None:
            weights = (1.0 / econ.n,) * econ.n
        else:
            weights = tuple(fees.transfer_weights.get(i, 0.0) for i in ids)
        return FeePolicy(threshold=threshold, fee_rate=fees.fee_rate, transfer_weights=weights)

    # -- normalized form --------------------------------------------------
    def normalized(self) -> dict:
        return self.model_dump(mode="json")

    def canonical_json(self) -> str:
        return json.dumps(self.normalized(), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def _format_errors(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        where = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{where}: {err['msg']}")
    return "; ".join(lines)


def parse_scenario(data: dict) -> ScenarioConfig:
    """
    Raises:
        ConfigValidationError: with one "field.path: message" entry per problem.
    """
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigValidationError(_format_errors(exc)) from exc


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    """
    Read and validate a TOML scenario.

    Raises:
        OSError: if the file cannot be read.
        ConfigValidationError: on TOML syntax errors or invalid fields.
    """
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigValidationError(f"{path}: {exc}") from exc
    return parse_scenario(data)
