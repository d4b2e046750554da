"""Single-day perturbation crafting, injection, and system-wide impact.

A perturbation replaces one stock's reported close on one test day and is
overwritten by the next day's clean data. Strict single-day visibility:
exactly one forecast (the one for day t+1, whose window ends on day t) sees
the perturbed value; every later window spanning day t sees the clean close
again. Portfolio marking and trade execution always use clean market prices,
so any divergence from the baseline is caused solely by that one forecast.

Magnitude modes:

* ``StdDevMode(omega)``   - clean close + 2 * std of the trailing omega closes
                            (an attacker guessing the model's window length);
* ``ConcealMode``         - report the previous day's close (hide a drop);
* ``OverestimateMode``    - report a fixed-fraction drop vs the previous day;
* ``CustomMode(value)``   - report an explicit value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import AttackSetupError
from .market_data import Dataset, StockSeries
from .predictor import (
    PredictionSeries,
    RidgePredictor,
    evaluate_rmse,
    predict_test_series,
)
from .strategy import StrategyConfig
from .trade_engine import CostModel, SimulationResult, run_simulation


@dataclass(frozen=True)
class StdDevMode:
    omega: int
    ddof: int = 1  # sample std; set 0 for population std

    def __post_init__(self):
        if self.omega < 2:
            raise AttackSetupError(f"omega must be >= 2, got {self.omega}")
        if self.ddof not in (0, 1):
            raise AttackSetupError(f"ddof must be 0 or 1, got {self.ddof}")


@dataclass(frozen=True)
class ConcealMode:
    pass


@dataclass(frozen=True)
class OverestimateMode:
    drop_fraction: float = 0.10

    def __post_init__(self):
        if not 0.0 < self.drop_fraction < 1.0:
            raise AttackSetupError(
                f"drop_fraction must be in (0,1), got {self.drop_fraction}"
            )


@dataclass(frozen=True)
class CustomMode:
    value: float


EpMode = StdDevMode | ConcealMode | OverestimateMode | CustomMode


@dataclass(frozen=True)
class EpSpec:
    """A fully described perturbation: which stock, which test day, how big."""

    ticker: str
    day: int  # test-window index
    mode: EpMode


@dataclass(frozen=True)
class AttackOutcome:
    ep: EpSpec
    perturbed_value: float
    clean_value: float
    rmse_clean: float
    rmse_attacked: float
    sharpe_baseline: float
    sharpe_attacked: float
    cr_baseline: float
    cr_attacked: float
    cr_ratio: float
    first_divergence_day: int | None

    @property
    def delta_sharpe(self) -> float:
        return self.sharpe_attacked - self.sharpe_baseline

    @property
    def cr_change_pct(self) -> float:
        """Cumulative-return change vs baseline, in percentage points."""
        return (self.cr_attacked - self.cr_baseline) * 100.0


@dataclass(frozen=True)
class CellError:
    day: int
    label: str
    message: str


@dataclass(frozen=True)
class SweepResult:
    outcomes: tuple[AttackOutcome, ...]
    baseline: SimulationResult
    errors: tuple[CellError, ...]


@dataclass(frozen=True)
class TargetedResult:
    outcomes: tuple[AttackOutcome, ...]
    baseline: SimulationResult
    errors: tuple[CellError, ...]


def apply_ep(series: StockSeries, ep: EpSpec, at: int | None = None) -> float:
    """The perturbed close for the attacked day; only that value changes.

    ``at`` is the bar index within ``series``; it defaults to ``ep.day``,
    which is correct when the series' own indexing already matches the
    test-window day numbering the EpSpec uses.
    """
    t = ep.day if at is None else at
    if not 0 <= t < len(series.bars):
        raise AttackSetupError(
            f"{series.ticker}: day index {t} outside the series"
        )
    clean = series.bars[t].close
    mode = ep.mode
    if isinstance(mode, StdDevMode):
        if t < mode.omega - 1:
            raise AttackSetupError(
                f"{series.ticker}: need {mode.omega} days of history ending "
                f"at index {t}"
            )
        closes = np.array(
            [b.close for b in series.bars[t - mode.omega + 1 : t + 1]],
            dtype=np.float64,
        )
        if closes.min() == closes.max():
            return clean  # constant window: sigma is exactly 0
        sigma = float(np.std(closes, ddof=mode.ddof))
        return clean + 2.0 * sigma
    if isinstance(mode, ConcealMode):
        if t < 1:
            raise AttackSetupError(f"{series.ticker}: no previous day before index {t}")
        return series.bars[t - 1].close
    if isinstance(mode, OverestimateMode):
        if t < 1:
            raise AttackSetupError(f"{series.ticker}: no previous day before index {t}")
        return series.bars[t - 1].close * (1.0 - mode.drop_fraction)
    if isinstance(mode, CustomMode):
        return mode.value
    raise AttackSetupError(f"unknown perturbation mode {mode!r}")


def perturbed_prediction_entry(
    predictor: RidgePredictor,
    full_series: StockSeries,
    test_start: int,
    ep: EpSpec,
) -> tuple[int, float, float, float] | None:
    """Recompute the single forecast whose window ends on the attacked day.

    Returns (entry_day, perturbed_entry, perturbed_close, clean_close), or
    None when the attacked day is the last one (nothing downstream sees it).
    """
    w = predictor.config.window
    a = test_start + ep.day
    perturbed_close = apply_ep(full_series, ep, at=a)
    clean_close = full_series.bars[a].close
    if a + 1 >= len(full_series.bars):
        return None
    if a < w - 1:
        raise AttackSetupError(
            f"{full_series.ticker}: no {w}-day model window ends at index {a}"
        )
    bars = list(full_series.bars[a - w + 1 : a + 1])
    bars[-1] = replace(bars[-1], close=perturbed_close)
    entry = predictor.predict_window(bars)
    return ep.day + 1, entry, perturbed_close, clean_close


def _trades_by_day(result: SimulationResult) -> dict[int, list]:
    grouped: dict[int, list] = {}
    for trade in result.trade_ledger:
        grouped.setdefault(trade.day, []).append(trade)
    return grouped


def _first_divergence(base: SimulationResult, attacked: SimulationResult) -> int | None:
    base_trades = _trades_by_day(base)
    attacked_trades = _trades_by_day(attacked)
    for t in range(len(base.daily_returns)):
        if base_trades.get(t, []) != attacked_trades.get(t, []):
            return t
        if base.daily_returns[t] != attacked.daily_returns[t]:
            return t
    return None


def _cr_ratio(cr_attacked: float, cr_baseline: float) -> float:
    if cr_attacked == cr_baseline:
        return 1.0
    if cr_baseline == 0.0:
        return math.nan
    return cr_attacked / cr_baseline


def _attack_outcome(
    dataset: Dataset,
    test_start: int,
    predictors: dict[str, RidgePredictor],
    strategy_config: StrategyConfig,
    cost_model: CostModel,
    ep: EpSpec,
    clean_predictions: dict[str, PredictionSeries],
    baseline: SimulationResult,
) -> tuple[SimulationResult, AttackOutcome]:
    if ep.ticker not in predictors:
        raise AttackSetupError(f"no predictor for attacked ticker {ep.ticker!r}")
    test = dataset.slice(test_start)
    n = test.n_days()
    if not 0 <= ep.day < n:
        raise AttackSetupError(
            f"attacked day {ep.day} outside the {n}-day test window"
        )

    full_series = dataset.series[ep.ticker]
    swap = perturbed_prediction_entry(
        predictors[ep.ticker], full_series, test_start, ep
    )
    attacked_predictions = dict(clean_predictions)
    if swap is None:
        perturbed_close = apply_ep(full_series, ep, at=test_start + ep.day)
        clean_close = full_series.bars[test_start + ep.day].close
    else:
        entry_day, entry, perturbed_close, clean_close = swap
        attacked_predictions[ep.ticker] = clean_predictions[ep.ticker].with_entry(
            entry_day, entry
        )

    attacked = run_simulation(test, attacked_predictions, strategy_config, cost_model)

    eval_days = sorted(clean_predictions[ep.ticker].entries)
    test_series = test.series[ep.ticker]
    rmse_clean = evaluate_rmse(clean_predictions[ep.ticker], test_series, eval_days)
    rmse_attacked = evaluate_rmse(
        attacked_predictions[ep.ticker], test_series, eval_days
    )

    cr_base = baseline.final_cumulative_return()
    cr_att = attacked.final_cumulative_return()
    outcome = AttackOutcome(
        ep=ep,
        perturbed_value=perturbed_close,
        clean_value=clean_close,
        rmse_clean=rmse_clean,
        rmse_attacked=rmse_attacked,
        sharpe_baseline=baseline.sharpe_ratio,
        sharpe_attacked=attacked.sharpe_ratio,
        cr_baseline=cr_base,
        cr_attacked=cr_att,
        cr_ratio=_cr_ratio(cr_att, cr_base),
        first_divergence_day=_first_divergence(baseline, attacked),
    )
    return attacked, outcome


def clean_run(
    dataset: Dataset,
    test_start: int,
    predictors: dict[str, RidgePredictor],
    strategy_config: StrategyConfig,
    cost_model: CostModel,
) -> tuple[dict[str, PredictionSeries], SimulationResult]:
    """Baseline forecasts and simulation over the test window."""
    predictions = {
        tk: predict_test_series(predictors[tk], dataset.series[tk], test_start)
        for tk in sorted(predictors)
    }
    test = dataset.slice(test_start)
    baseline = run_simulation(test, predictions, strategy_config, cost_model)
    return predictions, baseline


def run_attacked_simulation(
    dataset: Dataset,
    test_start: int,
    predictors: dict[str, RidgePredictor],
    strategy_config: StrategyConfig,
    cost_model: CostModel,
    ep: EpSpec,
) -> tuple[SimulationResult, AttackOutcome]:
    """One attacked run plus its impact record against a fresh baseline."""
    clean_predictions, baseline = clean_run(
        dataset, test_start, predictors, strategy_config, cost_model
    )
    return _attack_outcome(
        dataset,
        test_start,
        predictors,
        strategy_config,
        cost_model,
        ep,
        clean_predictions,
        baseline,
    )


def sweep_indiscriminate(
    dataset: Dataset,
    test_start: int,
    predictors: dict[str, RidgePredictor],
    strategy_config: StrategyConfig,
    cost_model: CostModel,
    ticker: str,
    omegas,
    ddof: int = 1,
    workers: int = 1,
) -> SweepResult:
    """Attack every feasible test day once per omega (day-major, omega-minor).

    Infeasible cells (not enough history for the sigma window) are recorded
    and skipped. Results are emitted in deterministic cell order regardless
    of worker scheduling; each cell owns its own simulation state.
    """
    omegas = list(omegas)
    if not omegas:
        raise AttackSetupError("need at least one omega")
    clean_predictions, baseline = clean_run(
        dataset, test_start, predictors, strategy_config, cost_model
    )
    n = dataset.slice(test_start).n_days()
    cells = [(day, omega) for day in range(n) for omega in omegas]

    def run_cell(cell):
        day, omega = cell
        ep = EpSpec(ticker=ticker, day=day, mode=StdDevMode(omega=omega, ddof=ddof))
        try:
            _, outcome = _attack_outcome(
                dataset,
                test_start,
                predictors,
                strategy_config,
                cost_model,
                ep,
                clean_predictions,
                baseline,
            )
            return outcome
        except AttackSetupError as exc:
            return CellError(day=day, label=f"omega={omega}", message=str(exc))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(c) for c in cells]

    outcomes = tuple(r for r in results if isinstance(r, AttackOutcome))
    errors = tuple(r for r in results if isinstance(r, CellError))
    return SweepResult(outcomes=outcomes, baseline=baseline, errors=errors)


def run_targeted(
    dataset: Dataset,
    test_start: int,
    predictors: dict[str, RidgePredictor],
    strategy_config: StrategyConfig,
    cost_model: CostModel,
    ticker: str,
    days,
    scenario: str,
    drop_fraction: float = 0.10,
) -> TargetedResult:
    """Conceal or overestimate the close on chosen event days, one run each."""
    if scenario == "conceal":
        mode: EpMode = ConcealMode()
    elif scenario == "overestimate":
        mode = OverestimateMode(drop_fraction=drop_fraction)
    else:
        raise AttackSetupError(
            f"scenario must be conceal or overestimate, got {scenario!r}"
        )
    clean_predictions, baseline = clean_run(
        dataset, test_start, predictors, strategy_config, cost_model
    )
    outcomes: list[AttackOutcome] = []
    errors: list[CellError] = []
    for day in days:
        ep = EpSpec(ticker=ticker, day=day, mode=mode)
        try:
            _, outcome = _attack_outcome(
                dataset,
                test_start,
                predictors,
                strategy_config,
                cost_model,
                ep,
                clean_predictions,
                baseline,
            )
            outcomes.append(outcome)
        except AttackSetupError as exc:
            errors.append(CellError(day=day, label=scenario, message=str(exc)))
    return TargetedResult(
        outcomes=tuple(outcomes), baseline=baseline, errors=tuple(errors)
    )
