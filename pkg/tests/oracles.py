"""Independent brute-force oracles, pure Python on purpose.

These re-derive expected values with plain loops and ``math`` so the numpy
code paths under test are checked against a second implementation.
"""

from __future__ import annotations

import math


def sample_std(values, ddof: int = 1) -> float:
    n = len(values)
    mean = sum(values) / n
    if n - ddof <= 0:
        return 0.0
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (n - ddof))


def cumulative_returns_oracle(returns) -> list[float]:
    out = []
    acc = 1.0
    for r in returns:
        acc *= 1.0 + r
        out.append(acc - 1.0)
    return out


def sharpe_oracle(returns, rf_annual: float, days_per_year: int) -> float:
    rf_daily = (1.0 + rf_annual) ** (1.0 / days_per_year) - 1.0
    excess = [r - rf_daily for r in returns]
    mean = sum(excess) / len(excess)
    std = sample_std(excess)
    if std == 0.0:
        return 0.0
    return mean / std * math.sqrt(days_per_year)


def quantile_oracle(values, q: float) -> float:
    """Linear interpolation between order statistics at position (n-1)*q."""
    xs = sorted(values)
    pos = (len(xs) - 1) * q
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return xs[lo]
    return xs[lo] + (xs[hi] - xs[lo]) * (pos - lo)


def ma_crossover_oracle(entries: dict, short: int, long: int, n: int) -> list[str]:
    def mean_ending(end, length):
        acc = 0.0
        for d in range(end - length + 1, end + 1):
            if d not in entries:
                return None
            acc += entries[d]
        return acc / length

    out = ["hold"] * n
    prev = None
    for t in range(n):
        s, l = mean_ending(t, short), mean_ending(t, long)
        if s is None or l is None:
            prev = None
            continue
        above = s > l
        if prev is not None and above != prev:
            out[t] = "buy" if above else "sell"
        prev = above
    return out


def roc_oracle(closes, entries: dict, lookback, buy_thr, sell_thr, n) -> list[str]:
    out = ["hold"] * n
    for t in range(n):
        ref_day = t - lookback
        if ref_day < 0 or ref_day >= len(closes) or t not in entries:
            continue
        roc = (entries[t] - closes[ref_day]) / closes[ref_day] * 100.0
        if roc > buy_thr:
            out[t] = "buy"
        elif roc < sell_thr:
            out[t] = "sell"
    return out


def bollinger_oracle(closes, entries: dict, period, width, n) -> list[str]:
    out = ["hold"] * n
    for t in range(n):
        if t - period < 0 or t > len(closes) or t not in entries:
            continue
        window = list(closes[t - period : t])
        mean = sum(window) / period
        half = width * sample_std(window)
        if entries[t] > mean + half:
            out[t] = "buy"
        elif entries[t] < mean - half:
            out[t] = "sell"
    return out


def accounting_oracle(closes_by_ticker: dict, signals_by_ticker: dict, cost) -> dict:
    """Hand-stepped portfolio accounting for pre-shifted signal streams.

    Follows the documented execution rules: buys/sells target a fixed value
    fraction, whole shares, per-share commission and adverse slippage, no-op
    when infeasible, tickers in lexicographic order.
    """
    tickers = sorted(closes_by_ticker)
    n = len(next(iter(closes_by_ticker.values())))
    cash = cost.initial_capital
    holdings = {tk: 0 for tk in tickers}
    values = []
    trades = []
    for t in range(n):
        closes_t = {tk: closes_by_ticker[tk][t] for tk in tickers}
        for tk in tickers:
            sig = signals_by_ticker[tk][t]
            close = closes_t[tk]
            total = cash + sum(holdings[k] * closes_t[k] for k in tickers)
            budget = cost.position_fraction * total
            if sig == "buy":
                price = close + cost.slippage_per_share
                shares = math.floor(budget / price)
                if shares < 1:
                    continue
                outlay = shares * price + shares * cost.commission_per_share
                if cash - outlay < 0:
                    continue
                cash -= outlay
                holdings[tk] += shares
                trades.append((t, tk, "buy", shares))
            elif sig == "sell":
                if holdings[tk] < 1:
                    continue
                shares = min(holdings[tk], math.floor(budget / close))
                if shares < 1:
                    continue
                price = close - cost.slippage_per_share
                cash += shares * price - shares * cost.commission_per_share
                holdings[tk] -= shares
                trades.append((t, tk, "sell", shares))
        values.append(cash + sum(holdings[k] * closes_t[k] for k in tickers))
    return {"values": values, "trades": trades, "cash": cash, "holdings": holdings}
