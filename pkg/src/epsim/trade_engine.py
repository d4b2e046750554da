"""Day-by-day execution of shifted signals against portfolio state.

Accounting rules:

* a Buy targets a fixed fraction of the current total portfolio value,
  buys whole shares at (close + slippage), pays per-share commission, and
  degrades to a no-op when that would overdraw cash or round to zero shares;
* a Sell mirrors the sizing (capped by holdings), executes at
  (close - slippage) minus commission, and is a no-op with no holdings;
* no shorting, no leverage: cash and holdings never go negative;
* tickers execute in lexicographic order so capital contention resolves
  deterministically.

A single run is strictly sequential; independent runs share no mutable state
and can be executed in parallel.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, MetricError, SimulationSetupError, ZeroVolatilityWarning
from .market_data import Dataset
from .predictor import PredictionSeries
from .strategy import Signal, StrategyConfig, generate_signals, shift_signals

RESULT_SCHEMA = "epsim/result/v1"


@dataclass(frozen=True)
class CostModel:
    commission_per_share: float = 0.005
    slippage_per_share: float = 0.02
    position_fraction: float = 0.10
    initial_capital: float = 100_000.0
    risk_free_annual: float = 0.0505
    trading_days_per_year: int = 252
    # "per_share": execution price = close +/- slippage_per_share (currency).
    # "proportional": execution price = close * (1 +/- slippage_per_share).
    slippage_mode: str = "per_share"

    def __post_init__(self):
        for name in (
            "commission_per_share",
            "slippage_per_share",
            "initial_capital",
            "risk_free_annual",
        ):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be nonnegative")
        if not 0 < self.position_fraction <= 1:
            raise ConfigurationError("position_fraction must be in (0,1]")
        if self.trading_days_per_year < 1:
            raise ConfigurationError("trading_days_per_year must be >= 1")
        if self.slippage_mode not in ("per_share", "proportional"):
            raise ConfigurationError(
                f"slippage_mode must be per_share or proportional, "
                f"got {self.slippage_mode!r}"
            )

    def buy_price(self, close: float) -> float:
        if self.slippage_mode == "proportional":
            return close * (1.0 + self.slippage_per_share)
        return close + self.slippage_per_share

    def sell_price(self, close: float) -> float:
        if self.slippage_mode == "proportional":
            return close * (1.0 - self.slippage_per_share)
        return close - self.slippage_per_share

    def risk_free_daily(self) -> float:
        return (1.0 + self.risk_free_annual) ** (1.0 / self.trading_days_per_year) - 1.0


@dataclass(frozen=True)
class TradeRecord:
    day: int
    ticker: str
    side: Signal
    shares: int
    execution_price: float
    commission_paid: float
    slippage_paid: float


class PortfolioState:
    """Cash, whole-share holdings, and the running valuation ledger."""

    def __init__(self, cash: float):
        self.cash = cash
        self.holdings: dict[str, int] = {}
        self.day = 0
        self.marks: dict[str, float] = {}
        self.value_history: list[float] = []

    def total_value(self) -> float:
        return self.cash + sum(
            shares * self.marks[tk] for tk, shares in self.holdings.items() if shares
        )


def execute_signal(
    state: PortfolioState,
    ticker: str,
    signal: Signal,
    day_close: float,
    cost_model: CostModel,
) -> TradeRecord | None:
    """Apply one signal to the portfolio; infeasible signals are no-ops.

    Mutates ``state`` and returns the trade record, or None when nothing
    executed. ``state.marks`` must already reflect the day's closes.
    """
    if signal is Signal.HOLD:
        return None
    if day_close <= 0:
        raise SimulationSetupError(f"{ticker}: non-positive close {day_close}")

    budget = cost_model.position_fraction * state.total_value()

    if signal is Signal.BUY:
        price = cost_model.buy_price(day_close)
        if price <= 0:
            return None
        shares = math.floor(budget / price)
        if shares < 1:
            return None
        commission = shares * cost_model.commission_per_share
        cost = shares * price + commission
        if state.cash - cost < 0:
            return None
        state.cash -= cost
        state.holdings[ticker] = state.holdings.get(ticker, 0) + shares
        return TradeRecord(
            day=state.day,
            ticker=ticker,
            side=Signal.BUY,
            shares=shares,
            execution_price=price,
            commission_paid=commission,
            slippage_paid=shares * (price - day_close),
        )

    held = state.holdings.get(ticker, 0)
    if held < 1:
        return None
    price = cost_model.sell_price(day_close)
    if price <= 0:
        return None
    shares = min(held, math.floor(budget / day_close))
    if shares < 1:
        return None
    commission = shares * cost_model.commission_per_share
    state.cash += shares * price - commission
    state.holdings[ticker] = held - shares
    return TradeRecord(
        day=state.day,
        ticker=ticker,
        side=Signal.SELL,
        shares=shares,
        execution_price=price,
        commission_paid=commission,
        slippage_paid=shares * (day_close - price),
    )


@dataclass(frozen=True)
class SimulationResult:
    daily_returns: tuple[float, ...]
    cumulative_returns: tuple[float, ...]
    sharpe_ratio: float
    trade_ledger: tuple[TradeRecord, ...]
    final_value: float

    def final_cumulative_return(self) -> float:
        return self.cumulative_returns[-1] if self.cumulative_returns else 0.0

    def trades_on(self, day: int) -> tuple[TradeRecord, ...]:
        return tuple(t for t in self.trade_ledger if t.day == day)

    def to_dict(self) -> dict:
        return {
            "schema": RESULT_SCHEMA,
            "daily_returns": list(self.daily_returns),
            "cumulative_returns": list(self.cumulative_returns),
            "sharpe_ratio": self.sharpe_ratio,
            "final_value": self.final_value,
            "trades": [
                {
                    "day": t.day,
                    "ticker": t.ticker,
                    "side": t.side.value,
                    "shares": t.shares,
                    "price": t.execution_price,
                    "commission": t.commission_paid,
                    "slippage": t.slippage_paid,
                }
                for t in self.trade_ledger
            ],
        }

    def serialize(self) -> str:
        """Canonical JSON; identical inputs give byte-identical output."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def cumulative_returns(daily_returns) -> list[float]:
    """c_t = prod_{d<=t} (1 + r_d) - 1."""
    returns = np.asarray(list(daily_returns), dtype=np.float64)
    if returns.size == 0:
        raise MetricError("cumulative_returns needs at least one return")
    return [float(v) for v in np.cumprod(1.0 + returns) - 1.0]


def sharpe_ratio(daily_returns, cost_model: CostModel) -> float:
    """Annualized mean excess daily return over its sample (n-1) std.

    Zero volatility is flagged with ZeroVolatilityWarning and reported as 0
    instead of dividing by zero.
    """
    returns = np.asarray(list(daily_returns), dtype=np.float64)
    if returns.size < 2:
        raise MetricError("sharpe_ratio needs at least 2 returns")
    excess = returns - cost_model.risk_free_daily()
    std = float(np.std(excess, ddof=1))
    if std == 0.0:
        warnings.warn(
            "zero-volatility return stream; Sharpe ratio reported as 0",
            ZeroVolatilityWarning,
            stacklevel=2,
        )
        return 0.0
    annualizer = math.sqrt(cost_model.trading_days_per_year)
    return float(np.mean(excess)) / std * annualizer


def run_signals(
    test: Dataset,
    signals: dict[str, list[Signal]],
    cost_model: CostModel,
) -> SimulationResult:
    """Execute pre-shifted per-ticker signal sequences over the test calendar.

    This is the scripted-signal entry point; :func:`run_simulation` layers
    strategy generation and the anti-lookahead shift on top of it.
    """
    n = test.n_days()
    tickers = test.tickers()
    for tk in tickers:
        if tk not in signals:
            raise SimulationSetupError(f"no signal sequence for {tk}")
        if len(signals[tk]) != n:
            raise SimulationSetupError(
                f"{tk}: {len(signals[tk])} signals for a {n}-day calendar"
            )
    closes = {tk: test.series[tk].closes() for tk in tickers}

    state = PortfolioState(cash=cost_model.initial_capital)
    ledger: list[TradeRecord] = []
    daily: list[float] = []
    prev_value = cost_model.initial_capital
    for t in range(n):
        state.day = t
        state.marks = {tk: float(closes[tk][t]) for tk in tickers}
        for tk in tickers:
            record = execute_signal(state, tk, signals[tk][t], state.marks[tk], cost_model)
            if record is not None:
                ledger.append(record)
        value = state.total_value()
        state.value_history.append(value)
        daily.append(value / prev_value - 1.0)
        prev_value = value

    return SimulationResult(
        daily_returns=tuple(daily),
        cumulative_returns=tuple(cumulative_returns(daily)) if daily else (),
        sharpe_ratio=sharpe_ratio(daily, cost_model) if len(daily) >= 2 else 0.0,
        trade_ledger=tuple(ledger),
        final_value=state.value_history[-1] if daily else cost_model.initial_capital,
    )


def run_simulation(
    test: Dataset,
    predictions: dict[str, PredictionSeries],
    strategy_config: StrategyConfig,
    cost_model: CostModel,
) -> SimulationResult:
    """Generate signals per ticker, shift them by one day, and execute.

    Deterministic: identical inputs yield bit-identical results.
    """
    n = test.n_days()
    if n == 0:
        raise SimulationSetupError("empty test calendar")
    shifted: dict[str, list[Signal]] = {}
    for tk in test.tickers():
        if tk not in predictions:
            raise SimulationSetupError(f"no predictions for {tk}")
        series = predictions[tk]
        bad = [d for d in series.entries if not 0 <= d < n]
        if bad:
            raise SimulationSetupError(
                f"{tk}: prediction days {sorted(bad)[:5]} outside the "
                f"{n}-day test calendar"
            )
        raw = generate_signals(test.series[tk], series, strategy_config, n)
        shifted[tk] = shift_signals(raw)
    return run_signals(test, shifted, cost_model)
