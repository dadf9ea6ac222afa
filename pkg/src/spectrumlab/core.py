"""Shared domain types for the auction laboratory.

Everything monetary is exact fixed-point decimal: money at 2 decimal
places, revenue shares at 6. Binary floats never touch a comparison that
decides a winner or a payment, so golden values stay byte-stable. All
randomness flows through :class:`RngStream`, a (seed, derivation-path)
pair that yields the same draws on every platform and in any execution
order.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from enum import Enum
from typing import Sequence, Union

import numpy as np

_CENT = Decimal("0.01")
_MICRO = Decimal("0.000001")


def _to_decimal(value: Union[int, str, Decimal]) -> Decimal:
    if isinstance(value, Decimal):
        return value
    if isinstance(value, (int, str)):
        return Decimal(value)
    raise TypeError(
        f"expected int, str or Decimal, got {type(value).__name__}; "
        "use from_float() for binary floats"
    )


@dataclass(frozen=True, order=True)
class Money:
    """Non-negative currency amount, exact at 2 decimal places.

    Addition and subtraction are exact; multiplication by a scalar
    rounds half-up to the cent. Subtraction below zero raises, since a
    negative amount of money is always a logic error here (signed
    quantities such as bidder surplus are plain Decimals).
    """

    amount: Decimal

    def __init__(self, value: Union[int, str, Decimal, "Money"] = 0):
        if isinstance(value, Money):
            amount = value.amount
        else:
            amount = _to_decimal(value)
        quantized = amount.quantize(_CENT, rounding=ROUND_HALF_UP)
        if quantized != amount:
            raise ValueError(f"money requires at most 2 decimal places, got {amount}")
        if quantized < 0:
            raise ValueError(f"money cannot be negative, got {amount}")
        object.__setattr__(self, "amount", quantized)

    @classmethod
    def from_float(cls, value: float) -> "Money":
        """Round a binary float to the nearest cent (half-up)."""
        if not np.isfinite(value):
            raise ValueError(f"money must be finite, got {value}")
        return cls(Decimal(repr(float(value))).quantize(_CENT, rounding=ROUND_HALF_UP))

    @classmethod
    def from_cents(cls, cents: int) -> "Money":
        return cls(Decimal(cents).scaleb(-2))

    @property
    def cents(self) -> int:
        return int(self.amount.scaleb(2))

    def __add__(self, other: "Money") -> "Money":
        return Money(self.amount + other.amount)

    def __sub__(self, other: "Money") -> "Money":
        result = self.amount - other.amount
        if result < 0:
            raise ValueError(f"money subtraction below zero: {self} - {other}")
        return Money(result)

    def scaled(self, factor: Union[int, float, Decimal]) -> "Money":
        """Multiply by a non-negative scalar, rounding half-up to the cent."""
        if isinstance(factor, float):
            factor = Decimal(repr(factor))
        else:
            factor = _to_decimal(factor)
        if factor < 0:
            raise ValueError(f"cannot scale money by negative factor {factor}")
        return Money((self.amount * factor).quantize(_CENT, rounding=ROUND_HALF_UP))

    def as_float(self) -> float:
        return float(self.amount)

    def __str__(self) -> str:
        return str(self.amount)

    def __repr__(self) -> str:
        return f"Money('{self.amount}')"


ZERO_MONEY = Money(0)


@dataclass(frozen=True, order=True)
class Share:
    """Fraction of revenue in [0, 1], exact at 10^-6 resolution."""

    value: Decimal

    def __init__(self, value: Union[int, str, Decimal, "Share"] = 0):
        if isinstance(value, Share):
            raw = value.value
        else:
            raw = _to_decimal(value)
        quantized = raw.quantize(_MICRO, rounding=ROUND_HALF_UP)
        if quantized != raw:
            raise ValueError(f"share resolution is 1e-6, got {raw}")
        if not 0 <= quantized <= 1:
            raise ValueError(f"share must lie in [0, 1], got {raw}")
        object.__setattr__(self, "value", quantized)

    @classmethod
    def from_float(cls, value: float) -> "Share":
        if not np.isfinite(value):
            raise ValueError(f"share must be finite, got {value}")
        return cls(Decimal(repr(float(value))).quantize(_MICRO, rounding=ROUND_HALF_UP))

    def of(self, money: Money) -> Money:
        """This share of a money amount, rounded to the cent."""
        return Money((self.value * money.amount).quantize(_CENT, rounding=ROUND_HALF_UP))

    def as_float(self) -> float:
        return float(self.value)

    @property
    def micros(self) -> int:
        return int(self.value.scaleb(6))

    def __str__(self) -> str:
        return str(self.value)

    def __repr__(self) -> str:
        return f"Share('{self.value}')"


ZERO_SHARE = Share(0)


class LicenseGroup(Enum):
    A = "A"
    B = "B"
    C = "C"
    NONE = "none"


@dataclass(frozen=True)
class License:
    """A single auctionable license (e.g. one regional circle)."""

    id: str
    label: str = ""
    group: LicenseGroup = LicenseGroup.NONE
    reservation: Money | None = None

    def __post_init__(self):
        if self.reservation is not None and not isinstance(self.reservation, Money):
            raise TypeError("reservation must be Money or None")


@dataclass(frozen=True)
class PriceBid:
    bidder_id: str
    license_id: str
    amount: Money


@dataclass(frozen=True)
class ShareBid:
    bidder_id: str
    license_id: str
    share: Share


Bid = Union[PriceBid, ShareBid]


def bid_amount(bid: Bid) -> Union[Money, Share]:
    """The comparable magnitude of a bid (price or share)."""
    if isinstance(bid, PriceBid):
        return bid.amount
    if isinstance(bid, ShareBid):
        return bid.share
    raise TypeError(f"not a bid: {type(bid).__name__}")


# --- bidder valuation models -------------------------------------------------


@dataclass(frozen=True)
class PointValue:
    """Known private value."""

    amount: Money


@dataclass(frozen=True)
class ValueDistribution:
    """Named private-value distribution: point, uniform(lo, hi) or normal(mu, sigma)."""

    family: str
    params: tuple[float, ...]

    _FAMILIES = ("point", "uniform", "normal")

    def __post_init__(self):
        if self.family not in self._FAMILIES:
            raise ValueError(f"unknown distribution family {self.family!r}")
        if self.family == "point" and len(self.params) != 1:
            raise ValueError("point distribution takes exactly one parameter")
        if self.family == "uniform":
            if len(self.params) != 2:
                raise ValueError("uniform distribution takes (lo, hi)")
            lo, hi = self.params
            if lo > hi:
                raise ValueError(f"uniform requires lo <= hi, got ({lo}, {hi})")
        if self.family == "normal":
            if len(self.params) != 2:
                raise ValueError("normal distribution takes (mu, sigma)")
            if self.params[1] < 0:
                raise ValueError("normal sigma must be non-negative")

    @classmethod
    def point(cls, value: float) -> "ValueDistribution":
        return cls("point", (float(value),))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "ValueDistribution":
        return cls("uniform", (float(lo), float(hi)))

    @classmethod
    def normal(cls, mu: float, sigma: float) -> "ValueDistribution":
        return cls("normal", (float(mu), float(sigma)))

    def mean(self) -> float:
        if self.family == "point":
            return self.params[0]
        if self.family == "uniform":
            return 0.5 * (self.params[0] + self.params[1])
        return self.params[0]

    def sample(self, rng: "RngStream") -> float:
        gen = rng.generator()
        if self.family == "point":
            return self.params[0]
        if self.family == "uniform":
            return float(gen.uniform(self.params[0], self.params[1]))
        return float(gen.normal(self.params[0], self.params[1]))


@dataclass(frozen=True)
class CommonValueSignal:
    """Common-value setting: each bidder sees value + noise, noise ~ N(0, sd^2)."""

    noise_sd: float

    def __post_init__(self):
        if self.noise_sd < 0:
            raise ValueError("signal noise must be non-negative")


ValueModel = Union[PointValue, ValueDistribution, CommonValueSignal]


@dataclass(frozen=True)
class ScoredAttributes:
    """Multi-criterion bid content: a fee plus three normalized quality scores."""

    license_fee: Money
    rollout_speed: float = 0.0
    rural_coverage: float = 0.0
    indigenous_content: float = 0.0

    def __post_init__(self):
        for name in ("rollout_speed", "rural_coverage", "indigenous_content"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class BidderProfile:
    """One bidder: valuation model, constraints and a strategy tag."""

    id: str
    value_model: ValueModel
    budget: Money | None = None
    risk_coefficient: float = 0.0
    strategy: str = "auto"
    attributes: ScoredAttributes | None = None
    strategy_params: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if not isinstance(self.value_model, (PointValue, ValueDistribution, CommonValueSignal)):
            raise TypeError("value_model must be PointValue, ValueDistribution or CommonValueSignal")
        if self.risk_coefficient < 0:
            raise ValueError("risk coefficient must be non-negative")

    def param(self, name: str, default: float | None = None) -> float | None:
        for key, value in self.strategy_params:
            if key == name:
                return value
        return default


# --- seeded randomness -------------------------------------------------------


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream addressed by (master seed, derivation path).

    Identical (seed, path) pairs produce identical draw sequences on every
    platform; child streams are independent for distinct paths. Backed by
    the counter-based Philox generator keyed with a SHA-256 digest of the
    path, so stream creation is cheap and order-free.
    """

    master_seed: int
    path: tuple[Union[str, int], ...] = ()

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master seed must be a 64-bit unsigned integer")
        for part in self.path:
            if isinstance(part, bool) or not isinstance(part, (str, int)):
                raise TypeError("derivation path parts must be str or int")

    def child(self, *labels: Union[str, int]) -> "RngStream":
        return RngStream(self.master_seed, self.path + tuple(labels))

    def _key(self) -> int:
        h = hashlib.sha256()
        h.update(self.master_seed.to_bytes(8, "little"))
        for part in self.path:
            if isinstance(part, int):
                h.update(b"i")
                h.update(part.to_bytes(16, "little", signed=True))
            else:
                encoded = part.encode("utf-8")
                h.update(b"s")
                h.update(len(encoded).to_bytes(4, "little"))
                h.update(encoded)
        return int.from_bytes(h.digest()[:16], "little")

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.Philox(key=self._key()))

    def pick_index(self, n: int) -> int:
        """Uniform index in [0, n)."""
        if n < 1:
            raise ValueError("cannot pick from an empty range")
        return int(self.generator().integers(n))


# --- ranking and tie-breaking ------------------------------------------------


@dataclass(frozen=True)
class RankedBid:
    bid: Bid
    input_index: int


@dataclass(frozen=True)
class Ranking:
    """Bids in descending order of amount, equal amounts grouped as tie sets.

    Groups preserve the original submission order of their members, and
    every ranked bid remembers its input index, so the ranking is always
    a permutation of its input.
    """

    groups: tuple[tuple[RankedBid, ...], ...] = ()

    def __bool__(self) -> bool:
        return bool(self.groups)

    def flattened(self) -> tuple[RankedBid, ...]:
        return tuple(rb for group in self.groups for rb in group)

    def top_group(self) -> tuple[RankedBid, ...]:
        if not self.groups:
            raise ValueError("empty ranking has no top group")
        return self.groups[0]

    def second_amount(self) -> Union[Money, Share, None]:
        """Highest losing amount: the top amount if the lead is tied, else the runner-up."""
        if not self.groups:
            return None
        if len(self.groups[0]) > 1:
            return bid_amount(self.groups[0][0].bid)
        if len(self.groups) > 1:
            return bid_amount(self.groups[1][0].bid)
        return None


def rank_bids(bids: Sequence[Bid]) -> Ranking:
    """Order bids for one license from highest to lowest amount.

    An empty list ranks to an empty ranking; mixing license ids is an
    error because cross-license comparison is meaningless.
    """
    if not bids:
        return Ranking()
    license_ids = {bid.license_id for bid in bids}
    if len(license_ids) > 1:
        raise ValueError(f"bids reference multiple licenses: {sorted(license_ids)}")
    kinds = {type(bid) for bid in bids}
    if len(kinds) > 1:
        raise ValueError("cannot rank price bids against share bids")

    indexed = [RankedBid(bid, i) for i, bid in enumerate(bids)]
    indexed.sort(key=lambda rb: (bid_amount(rb.bid), -rb.input_index), reverse=True)

    groups: list[list[RankedBid]] = []
    for rb in indexed:
        if groups and bid_amount(groups[-1][0].bid) == bid_amount(rb.bid):
            groups[-1].append(rb)
        else:
            groups.append([rb])
    for group in groups:
        group.sort(key=lambda rb: rb.input_index)
    return Ranking(tuple(tuple(g) for g in groups))


def break_tie(tie_group: Sequence[Bid], rng: RngStream) -> Bid:
    """Pick one bid from a tie group by a seeded uniform draw.

    The draw comes from a stream derived as (master_seed, license_id,
    "tie"), so the same seed always resolves the same tie the same way.
    """
    if not tie_group:
        raise ValueError("tie group must be non-empty")
    if len(tie_group) == 1:
        return tie_group[0]
    stream = rng.child(tie_group[0].license_id, "tie")
    return tie_group[stream.pick_index(len(tie_group))]
