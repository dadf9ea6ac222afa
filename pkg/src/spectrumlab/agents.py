"""Bidder strategy functions: profile plus market context in, bid out.

Covers truthful and shaded bidding, the symmetric first-price sealed-bid
equilibrium for iid uniform values, budget capping, the risk-averse
certainty-equivalent bid under exponential utility, the common-value
selection-bias correction, and the NPV back-out of a maximum revenue
share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import Money, RngStream, Share, ValueDistribution


def truthful_bid(value: Money) -> Money:
    """Bid exactly the private value."""
    return value


def shaded_bid(value: Money, gamma: float) -> Money:
    """Bid (1 - gamma) times the value, rounded to the cent.

    gamma must lie in [0, 1); zero reduces to truthful bidding.
    """
    if not 0 <= gamma < 1:
        raise ValueError(f"shading factor must be in [0, 1), got {gamma}")
    return value.scaled(1.0 - gamma)


def equilibrium_fpsb_bid(value: float, n: int) -> float:
    """Symmetric equilibrium bid for iid uniform [0, 1] private values.

    With n risk-neutral bidders the equilibrium strategy is
    ((n - 1) / n) * value.
    """
    if n < 2:
        raise ValueError(f"equilibrium bid needs at least 2 bidders, got {n}")
    if not 0 <= value <= 1:
        raise ValueError(f"value must lie in [0, 1], got {value}")
    return (n - 1) / n * value


def budget_constrained_bid(value: Money, budget: Money) -> Money:
    """Bid the value, capped by what financing allows."""
    return min(value, budget)


def certainty_equivalent_bid(
    dist: ValueDistribution, a: float, rng: RngStream | None = None
) -> Money:
    """Largest bid a CARA bidder with utility 1 - exp(-a*x) accepts.

    Solves E[u(V - b)] = u(0), giving b = -(1/a) ln E[exp(-a V)]. For a
    normal value this is mu - a*sigma^2/2 in closed form; the uniform
    case is evaluated by quadrature; a point value passes through. The
    risk-neutral limit a = 0 returns the distribution mean.
    """
    if a < 0:
        raise ValueError(f"risk coefficient must be non-negative, got {a}")
    if dist.family == "point":
        return Money.from_float(dist.params[0])
    if a == 0.0:
        return Money.from_float(dist.mean())
    if dist.family == "normal":
        mu, sigma = dist.params
        return Money.from_float(mu - a * sigma * sigma / 2.0)
    lo, hi = dist.params
    if lo == hi:
        return Money.from_float(lo)
    mgf, _ = integrate.quad(lambda v: math.exp(-a * v) / (hi - lo), lo, hi)
    if not np.isfinite(mgf) or mgf <= 0:
        raise ValueError("moment generating integral did not converge")
    return Money.from_float(-math.log(mgf) / a)


_MAX_NORMAL_DRAWS = 100_000
_max_normal_cache: dict[tuple[int, int], float] = {}


def expected_max_standard_normal(n: int, rng: RngStream) -> float:
    """Monte Carlo estimate of E[max of n iid standard normals], cached per stream."""
    if n < 1:
        raise ValueError("need at least one draw")
    if n == 1:
        return 0.0
    key = (n, rng._key())
    hit = _max_normal_cache.get(key)
    if hit is None:
        draws = rng.generator().standard_normal((_MAX_NORMAL_DRAWS, n))
        hit = float(draws.max(axis=1).mean())
        _max_normal_cache[key] = hit
    return hit


def common_value_bid(
    signal: Money, mode: str, n: int, noise_sd: float, rng: RngStream
) -> Money:
    """Bid off a noisy signal of a common value.

    In "naive" mode the signal is bid as-is. In "corrected" mode the bid
    subtracts the expected highest of n noise draws — the amount by which
    the winner's signal overstates the value on average — estimated once
    per n by Monte Carlo and scaled by the noise level.
    """
    if mode not in ("naive", "corrected"):
        raise ValueError(f"mode must be naive or corrected, got {mode!r}")
    if n < 1:
        raise ValueError(f"need at least one bidder, got {n}")
    if noise_sd < 0:
        raise ValueError(f"noise level must be non-negative, got {noise_sd}")
    if mode == "naive" or n == 1 or noise_sd == 0:
        return signal
    correction = noise_sd * expected_max_standard_normal(
        n, rng.child("selection-bias", n)
    )
    corrected = signal.as_float() - correction
    return Money.from_float(max(0.0, corrected))


# --- cash-flow forecasting and the share back-out ------------------------------


@dataclass(frozen=True)
class CashFlowForecast:
    """Per-period revenue and cost projections with a hurdle rate.

    Periods are discounted at (1 + rate)^-t for t = 1..T. The customary
    project life for a license venture is 30 periods.
    """

    revenues: tuple[Money, ...]
    costs: tuple[Money, ...]
    rate: float = 0.0

    def __post_init__(self):
        if len(self.revenues) < 1:
            raise ValueError("forecast needs at least one period")
        if len(self.revenues) != len(self.costs):
            raise ValueError("revenue and cost streams must have equal length")
        if self.rate < 0:
            raise ValueError("hurdle rate must be non-negative")

    @classmethod
    def flat(
        cls, periods: int, revenue: Money, cost: Money, rate: float = 0.0
    ) -> "CashFlowForecast":
        if periods < 1:
            raise ValueError("project life must be at least one period")
        return cls((revenue,) * periods, (cost,) * periods, rate)

    @property
    def periods(self) -> int:
        return len(self.revenues)


def present_value(amounts: tuple[Money, ...] | list[Money], rate: float) -> float:
    """Discounted sum of a money stream, periods indexed from 1."""
    return sum(
        m.as_float() / (1.0 + rate) ** t for t, m in enumerate(amounts, start=1)
    )


def share_backout(forecast: CashFlowForecast) -> Share:
    """Largest revenue share the venture can concede and still break even.

    Assuming the share is paid every period of the project life,
    s* = (PV(revenues) - PV(costs)) / PV(revenues), clamped to [0, 1].
    Returns zero — the no-bid signal — when costs swallow revenues or
    there is no revenue to share.
    """
    pv_rev = present_value(forecast.revenues, forecast.rate)
    if pv_rev <= 0:
        return Share(0)
    pv_cost = present_value(forecast.costs, forecast.rate)
    if pv_cost >= pv_rev:
        return Share(0)
    return Share.from_float(min(1.0, (pv_rev - pv_cost) / pv_rev))
