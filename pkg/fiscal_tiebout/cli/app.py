"""
Command-line entry point for fiscal_tiebout.

Responsibilities:
    - Load and validate a scenario file
    - Run the equilibrium solver, a policy evaluation or the RDD pipeline
    - Write CSV tables, a Markdown summary and a run manifest through a result store
    - Map failures onto the exit-code contract

Exit codes:
    0 success, 2 validation, 3 solver non-convergence, 4 I/O.

Architecture:
    - CLI factory pattern (create_cli) so tests get a fresh command tree.
    - Result store chosen by the storage factory; the CLI never touches paths directly
      after building it.

LLM Prompt Example:
    "Show how a click command group built by a factory can share option
    decorators and translate domain exceptions into stable exit codes."
"""

from __future__ import annotations

import logging
from typing import Callable, Optional

import click
import numpy as np
import pandas as pd

from ..config import settings
from ..diagnostics.trace import SolverTrace
from ..districts.game import GameSolution, nash_equilibrium
from ..errors import (
    ConfigValidationError,
    InsufficientData,
    InvalidParams,
    NoConvergence,
    NoImprovingCap,
    OdeStepFailure,
    SingularDesign,
)
from ..market.allocation import assign_locations
from ..market.audit import ic_audit
from ..market.economy import Economy
from ..market.money_values import money_values
from ..market.prices import steady_state_prices
from ..policy.caps import find_pareto_caps, solve_capped_equilibrium
from ..policy.fees import solve_fee_policy
from ..policy.instruments import PolicyReport
from ..policy.renters import expenditure_floor_check, stationary_rent
from ..rdd.estimators import binned_scatter, fuzzy_rdd, local_linear_rdd, sharp_rdd_poly
from ..rdd.montecarlo import run_monte_carlo
from ..rdd.neighbors import neighbor_outcomes
from ..rdd.panel import Panel, generate_panel
from ..storage.base import BaseResultStore
from ..storage.storage_factory import get_store
from . import reports
from .manifest import RunManifest
from .scenario import ScenarioConfig, load_scenario

log = logging.getLogger("fiscal_tiebout.cli")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4

HELP = {
    "caps": "Search for a Pareto-improving common cap (or evaluate explicit caps).",
    "fees": "Solve the game under a tax-on-tax fee and compare with the baseline.",
    "floor": "Check whether a common expenditure floor helps every district.",
}

ESTIMATE_COLUMNS = ["estimate", "se", "p", "n", "bandwidth", "spec", "design", "outcome", "lag",
                    "first_stage_f", "weak_first_stage"]


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _configure_logging() -> None:
    if not logging.getLogger().handlers:
        logging.basicConfig(level=settings.LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)


def _run_options(fn: Callable) -> Callable:
    fn = click.option("--threads", type=int, default=None, help="Worker processes (default from settings).")(fn)
    fn = click.option("--seed", type=int, default=None, help="Override the scenario seed.")(fn)
    fn = click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Output directory.")(fn)
    fn = click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True, help="Scenario TOML.")(fn)
    return fn


def _run(command: str, config_path: str, out_dir: str, seed: Optional[int], threads: Optional[int],
         body: Callable[[ScenarioConfig, BaseResultStore, int, int], None], *, seed_of=None) -> None:
    """Load, execute, write the manifest and exit with the contract code."""
    try:
        cfg = load_scenario(config_path)
    except ConfigValidationError as exc:
        click.echo(f"error: invalid scenario: {exc}", err=True)
        raise SystemExit(EXIT_VALIDATION)
    except OSError as exc:
        click.echo(f"error: cannot read scenario: {exc}", err=True)
        raise SystemExit(EXIT_IO)

    if seed is None:
        seed = seed_of(cfg) if seed_of else cfg.solver.seed
    workers = max(1, threads) if threads is not None else settings.WORKERS
    try:
        store = get_store(root=out_dir)
    except OSError as exc:
        click.echo(f"error: cannot create output directory: {exc}", err=True)
        raise SystemExit(EXIT_IO)

    manifest = RunManifest(command=command, config_hash=cfg.config_hash(), seed=seed)
    code = EXIT_OK
    try:
        body(cfg, store, seed, workers)
    except _Failure as exc:
        click.echo(f"error: {exc}", err=True)
        code = exc.code
    except (ConfigValidationError, InvalidParams, InsufficientData, SingularDesign) as exc:
        click.echo(f"error: {exc}", err=True)
        code = EXIT_VALIDATION
    except NoConvergence as exc:
        click.echo(f"error: {exc}", err=True)
        store.save_json("diagnostics", {"message": str(exc), "trace": exc.trace or {}})
        code = EXIT_CONVERGENCE
    except OdeStepFailure as exc:
        click.echo(f"error: {exc}", err=True)
        store.save_json("diagnostics", {"message": str(exc)})
        code = EXIT_CONVERGENCE
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(EXIT_IO)

    try:
        store.save_json("manifest", manifest.finish(store.list_outputs(), code).model_dump(mode="json"))
    except OSError as exc:
        click.echo(f"error: cannot write manifest: {exc}", err=True)
        raise SystemExit(EXIT_IO)
    if code != EXIT_OK:
        raise SystemExit(code)
    log.info("%s finished: %d outputs", command, len(store.list_outputs()))


# ---------------------------------------------------------------------------
# shared solver plumbing
# ---------------------------------------------------------------------------
def _economy(cfg: ScenarioConfig) -> Economy:
    if cfg.economy is None:
        raise ConfigValidationError("this command needs an [economy] block")
    return cfg.to_economy()


def _policy_kwargs(cfg: ScenarioConfig, workers: int) -> dict:
    kwargs = cfg.solver.game_kwargs()
    kwargs.pop("initial")
    kwargs.pop("starts")
    kwargs["workers"] = workers
    return kwargs


def _solve(cfg: ScenarioConfig, store: BaseResultStore, econ: Economy, workers: int):
    trace = SolverTrace(tolerance=cfg.solver.tol)
    try:
        solution = nash_equilibrium(econ, workers=workers, trace=trace, **cfg.solver.game_kwargs())
    finally:
        rows = trace.rows()
        store.save_table("trace", pd.DataFrame(rows) if rows else pd.DataFrame(columns=["iteration", "change"]))
    return solution, solution.horizon


def write_equilibrium(store: BaseResultStore, cfg: ScenarioConfig, econ: Economy, solution: GameSolution,
                      seed: int) -> None:
    ids = [d.id for d in econ.districts]
    e = np.asarray(solution.e_star)
    alloc = assign_locations(econ, e)
    mvs = money_values(econ, alloc, e)

    expenditures = pd.DataFrame([
        {
            "district": ids[j],
            "e_star": e[j],
            "school_quality": float(econ.school_quality(j, e[j])),
            "objective": v.total,
            "school_term": v.school_term,
            "owner_welfare": v.owner_welfare,
            "renter_welfare": v.renter_welfare,
            "revenue": solution.tax_star[j].revenue,
        }
        for j, v in enumerate(solution.objectives)
    ])
    store.save_table("expenditures", expenditures)

    taxes, prices = [], []
    for j, tax in enumerate(solution.tax_star):
        m = np.asarray(mvs.m_by_district(j, tax.q), dtype=float)
        price = np.asarray(steady_state_prices(m, tax.tau, econ.r), dtype=float)
        rent = np.asarray(stationary_rent(m, tax.tau, econ.r), dtype=float)
        taxes.append(pd.DataFrame({"district": ids[j], "q": tax.q, "tau": tax.tau, "weight": tax.weights,
                                   "consumption": tax.consumption}))
        prices.append(pd.DataFrame({"district": ids[j], "q": tax.q, "m": m, "tau": tax.tau, "price": price,
                                    "rent": rent}))
    store.save_table("tax_schedules", pd.concat(taxes, ignore_index=True))
    store.save_table("prices", pd.concat(prices, ignore_index=True))

    store.save_table("allocation", pd.DataFrame(alloc.segment_table()))
    cutoffs = {"lower": alloc.lower_cutoff, "upper": alloc.upper_cutoff}
    cut_rows = [{"cutoff": "lower", "w": cutoffs["lower"]}, {"cutoff": "upper", "w": cutoffs["upper"]}]
    cut_rows += [{"cutoff": f"boundary_{k}", "w": w} for k, w in enumerate(alloc.cutoffs)]
    store.save_table("cutoffs", pd.DataFrame(cut_rows))
    store.save_table("money_values", pd.DataFrame(mvs.table()))

    audit = ic_audit(econ, alloc, mvs, cfg.solver.ic_samples, seed=seed).as_dict() if cfg.solver.ic_samples else {
        "n_checked": 0, "max_violation": float("nan"), "passed": True}
    store.save_json("ic_audit", audit)
    solver = {"iterations": solution.iterations, "br_residual": solution.br_residual,
              "reference_residual": solution.reference_residual,
              "multiple_equilibria": solution.multiple_equilibria}
    store.save_text("summary.md", reports.equilibrium_summary(cfg.name, expenditures, cutoffs, solver, audit))


def _write_policy(store: BaseResultStore, cfg: ScenarioConfig, ids, kind: str, verdict: str, report: PolicyReport,
                  extra: dict) -> None:
    rows = report.rows(ids)
    store.save_table("policy_report", pd.DataFrame(rows))
    sweep = report.details.get("sweep")
    if sweep:
        store.save_table("sweep", pd.DataFrame(sweep))
    extra = {"pareto": report.pareto, **extra}
    store.save_text("summary.md", reports.policy_summary(cfg.name, kind, verdict, rows, extra))


# ---------------------------------------------------------------------------
# command bodies
# ---------------------------------------------------------------------------
def _equilibrium_body(cfg, store, seed, workers):
    econ = _economy(cfg)
    solution, _ = _solve(cfg, store, econ, workers)
    write_equilibrium(store, cfg, econ, solution, seed)


def _caps_body(cfg, store, seed, workers):
    econ = _economy(cfg)
    ids = [d.id for d in econ.districts]
    baseline, horizon = _solve(cfg, store, econ, workers)
    kwargs = _policy_kwargs(cfg, workers)
    caps = cfg.policy.caps
    if caps.caps:
        treated = solve_capped_equilibrium(econ, cfg.cap_policy(econ), baseline=baseline, horizon=horizon, **kwargs)
        report = PolicyReport.compare(ids, baseline, treated, caps=caps.caps, mode=caps.mode)
        verdict = "pareto improvement" if report.pareto else "not pareto improving"
        _write_policy(store, cfg, ids, "caps", verdict, report, {"mode": caps.mode})
        return
    try:
        report = find_pareto_caps(econ, cfg.cap_targets(econ), baseline=baseline, horizon=horizon,
                                  n_grid=caps.n_grid, **kwargs)
        verdict = "pareto-improving cap found"
    except NoImprovingCap as exc:
        log.warning("%s", exc)
        report = exc.report
        verdict = "none found"
    extra = {"chosen delta": report.details.get("delta", 0.0), "delta_max": report.details.get("delta_max", 0.0)}
    tilde = report.details.get("e_fixed_gap", {})
    if tilde:
        store.save_table("fixed_gap", pd.DataFrame({"district": list(tilde), "e_fixed_gap": list(tilde.values())}))
    _write_policy(store, cfg, ids, "caps", verdict, report, extra)


def _fees_body(cfg, store, seed, workers):
    econ = _economy(cfg)
    ids = [d.id for d in econ.districts]
    baseline, horizon = _solve(cfg, store, econ, workers)
    policy = cfg.fee_policy(econ)
    report = solve_fee_policy(econ, policy, baseline=baseline, horizon=horizon, **_policy_kwargs(cfg, workers))
    store.save_table("fees", pd.DataFrame({
        "district": ids,
        "fee": [report.details["fees"][i] for i in ids],
        "transfer": [report.details["transfers"][i] for i in ids],
    }))
    budget = report.details["budget"]
    if not report.strict_gainers and not report.harmed:
        verdict = "no change"
    else:
        verdict = "pareto improvement" if report.pareto else "not pareto improving"
    _write_policy(store, cfg, ids, "fees", verdict, report,
                  {"fee_rate": policy.fee_rate, "collected": budget["collected"], "imbalance": budget["imbalance"]})


def _floor_body(cfg, store, seed, workers):
    econ = _economy(cfg)
    ids = [d.id for d in econ.districts]
    baseline, horizon = _solve(cfg, store, econ, workers)
    report = expenditure_floor_check(econ, horizon=horizon, baseline=baseline, n_grid=cfg.policy.floor.n_grid)
    rows = report.rows(ids)
    store.save_table("floor_report", pd.DataFrame(rows))
    if report.sweep:
        store.save_table("sweep", pd.DataFrame(list(report.sweep)))
    if not report.applicable:
        verdict = "not applicable"
    else:
        verdict = "pareto-improving floor found" if report.pareto else "none found"
    extra = {"pareto": report.pareto, "floor increase": report.floor_increase if report.floor_increase else 0.0}
    store.save_text("summary.md", reports.policy_summary(cfg.name, "floor", verdict, rows, extra))


def _rdd_seed(cfg: ScenarioConfig) -> int:
    return cfg.rdd.seed if cfg.rdd is not None else 0


def _rdd_block(cfg: ScenarioConfig):
    if cfg.rdd is None:
        raise ConfigValidationError("this command needs an [rdd] block")
    return cfg.rdd


def _simulate_body(cfg, store, seed, workers):
    rdd = _rdd_block(cfg)
    panel = generate_panel(rdd.panel_params(), seed)
    store.save_table("panel", panel.rows)
    store.save_table("adjacency", panel.adjacency)
    store.save_table("referenda", panel.referenda)
    store.save_json("dgp_truth", dict(panel.dgp_truth))


def estimate_grid(panel: Panel, cfg: ScenarioConfig, store: Optional[BaseResultStore] = None) -> pd.DataFrame:
    """Every configured estimate for ``panel``; unusable cells are skipped with a warning."""
    est_cfg = _rdd_block(cfg).estimate
    kw = {"transform": est_cfg.transform, "min_side": est_cfg.min_side}
    rows = []

    def add(fn, *args, prefix="", **extra):
        try:
            result = fn(*args, **kw, **extra)
        except (InsufficientData, SingularDesign) as exc:
            log.warning("skipped %s%s: %s", prefix, args[1:], exc)
            return
        row = result.as_row()
        row["outcome"] = prefix + row["outcome"]
        rows.append(row)

    neighbors = None
    if est_cfg.neighbors and not panel.adjacency.empty:
        neighbors = neighbor_outcomes(panel, est_cfg.exclude_shared_school)
    for lag in est_cfg.lags:
        for outcome in est_cfg.outcomes:
            add(sharp_rdd_poly, panel, outcome, lag)
            add(local_linear_rdd, panel, outcome, lag, bandwidth=est_cfg.bandwidth, ik=est_cfg.ik_constants())
            if neighbors is not None:
                add(sharp_rdd_poly, neighbors, outcome, lag, prefix="neighbor:")
            if store is not None:
                store.save_table(f"binned/{outcome}_lag{lag}",
                                 binned_scatter(panel, outcome, lag, transform=est_cfg.transform, n_bins=est_cfg.n_bins))
        for outcome in est_cfg.fuzzy_outcomes:
            add(fuzzy_rdd, panel, outcome, est_cfg.treatment, lag)
    return pd.DataFrame(rows, columns=ESTIMATE_COLUMNS)


def _estimate_body(panel_path: str, adjacency_path: Optional[str]):
    def body(cfg, store, seed, workers):
        try:
            panel = Panel.from_csv(panel_path, adjacency_path)
        except OSError as exc:
            raise _Failure(EXIT_IO, f"cannot read panel: {exc}") from exc
        estimates = estimate_grid(panel, cfg, store)
        store.save_table("estimates", estimates)
        store.save_text("summary.md", reports.rdd_summary(cfg.name, estimates))
    return body


def _montecarlo_body(cfg, store, seed, workers):
    rdd = _rdd_block(cfg)
    mc = run_monte_carlo(rdd.panel_params(), rdd.monte_carlo.replications, seed=seed, lag=rdd.monte_carlo.lag,
                         workers=workers)
    store.save_table("replications", mc.replications)
    store.save_table("monte_carlo_summary", mc.summary)
    store.save_text("summary.md", reports.montecarlo_summary(cfg.name, mc.summary, rdd.monte_carlo.replications))


# ---------------------------------------------------------------------------
# factory
# ---------------------------------------------------------------------------
def create_cli() -> click.Group:
    """
    Build a fresh ``fiscal-tiebout`` command tree.

    Returns:
        click.Group: equilibrium, policy {caps, fees, floor} and rdd {simulate, estimate, montecarlo}.
    """

    @click.group(name="fiscal-tiebout")
    @click.version_option(settings.ARTIFACT_VERSION, prog_name="fiscal-tiebout")
    def cli():
        """Tiebout competition solver and referendum RDD toolkit."""
        _configure_logging()

    @cli.command("equilibrium")
    @_run_options
    def equilibrium(config_path, out_dir, seed, threads):
        """Solve the housing market and district expenditure game."""
        _run("equilibrium", config_path, out_dir, seed, threads, _equilibrium_body)

    @cli.group("policy")
    def policy():
        """Evaluate caps, fees and floors against the baseline equilibrium."""

    for name, body in (("caps", _caps_body), ("fees", _fees_body), ("floor", _floor_body)):
        def make(name=name, body=body):
            @policy.command(name, help=HELP[name])
            @_run_options
            def command(config_path, out_dir, seed, threads):
                _run(f"policy {name}", config_path, out_dir, seed, threads, body)
            return command
        make()

    @cli.group("rdd")
    def rdd():
        """Synthetic referendum panels and discontinuity estimates."""

    @rdd.command("simulate")
    @_run_options
    def simulate(config_path, out_dir, seed, threads):
        """Write a synthetic panel with planted effects."""
        _run("rdd simulate", config_path, out_dir, seed, threads, _simulate_body, seed_of=_rdd_seed)

    @rdd.command("estimate")
    @_run_options
    @click.option("--panel", "panel_path", type=click.Path(dir_okay=False), required=True, help="Panel CSV.")
    @click.option("--adjacency", "adjacency_path", type=click.Path(dir_okay=False), default=None,
                  help="Adjacency CSV (enables neighbour estimates).")
    def estimate(config_path, out_dir, seed, threads, panel_path, adjacency_path):
        """Estimate sharp, local-linear and fuzzy discontinuities on a panel."""
        _run("rdd estimate", config_path, out_dir, seed, threads, _estimate_body(panel_path, adjacency_path),
             seed_of=_rdd_seed)

    @rdd.command("montecarlo")
    @_run_options
    def montecarlo(config_path, out_dir, seed, threads):
        """Coverage and rejection rates over simulated panels."""
        _run("rdd montecarlo", config_path, out_dir, seed, threads, _montecarlo_body, seed_of=_rdd_seed)

    return cli


def main() -> None:  # pragma: no cover - console script
    create_cli()()
