"""Equal-weight calendar-rebalanced backtests and tear-sheet metrics."""

from ._core import (
    AlignmentError,
    ConfigError,
    DomainError,
    Error,
    UndefinedMetric,
    aggregate,
    alpha_beta,
    annual_return,
    annual_volatility,
    backtest,
    box_plot_summary,
    cagr,
    calmar,
    cumulative_return,
    daily_var,
    initial_allocation,
    kurtosis,
    max_drawdown,
    max_drawdown_from_returns,
    omega,
    percentile,
    rebalance_dates,
    run_backtest,
    sharpe,
    skewness,
    sortino,
    stability,
    tail_ratio,
    tear_sheet,
    total_return,
)

__all__ = [name for name in dir() if not name.startswith("_")]
