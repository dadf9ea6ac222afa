"""Auction mechanisms as pure functions from bids to outcomes.

Five formats live here: first-price sealed bid, second-price (Vickrey)
sealed bid, weighted-score sealed bid, the simultaneous ascending
multi-round format, and the revenue-share auction with its escrowed
government valuation and payment schedule. Every function consumes
immutable inputs plus an explicit :class:`~spectrumlab.core.RngStream`
and is safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import Decimal
from typing import Mapping, Sequence, Union

from .core import (
    License,
    Money,
    PriceBid,
    Ranking,
    RngStream,
    ScoredAttributes,
    Share,
    ShareBid,
    ZERO_MONEY,
    ZERO_SHARE,
    bid_amount,
    break_tie,
    rank_bids,
)

Amount = Union[Money, Share]


class SealedValuationError(RuntimeError):
    """Raised when code tries to read an escrowed valuation before close."""


@dataclass(frozen=True)
class DefaultRecord:
    """One defaulted winner: who, what they bid, and the penalty charged."""

    bidder_id: str
    bid: Money
    penalty: Money


@dataclass(frozen=True)
class AuctionOutcome:
    """Result of one license's auction, with the full disclosed bid record.

    ``all_bids`` contains every submitted bid exactly once — disclosure of
    all bids and bidder identities is part of the mechanism contract, not
    an afterthought. ``payment`` is Money for price mechanisms and a
    Share for the revenue-share format; an unsold license has no winner
    and no payment.
    """

    license_id: str
    winner: str | None
    payment: Amount | None
    winning_bid: Amount | None
    all_bids: tuple
    rounds_used: int = 1
    default_trace: tuple[DefaultRecord, ...] = ()
    tie_broken: bool = False

    def __post_init__(self):
        if self.winner is None and self.payment is not None:
            raise ValueError("an unsold outcome cannot carry a payment")
        if isinstance(self.payment, Money) and isinstance(self.winning_bid, Money):
            if self.payment > self.winning_bid:
                raise ValueError(
                    f"payment {self.payment} exceeds winning bid {self.winning_bid}"
                )
        if isinstance(self.payment, Share) and isinstance(self.winning_bid, Share):
            if self.payment > self.winning_bid:
                raise ValueError(
                    f"paid share {self.payment} exceeds winning share {self.winning_bid}"
                )

    @property
    def sold(self) -> bool:
        return self.winner is not None

    def visible_rent(self) -> Money | None:
        """Winning bid minus payment, for price outcomes only."""
        if isinstance(self.payment, Money) and isinstance(self.winning_bid, Money):
            return self.winning_bid - self.payment
        return None


@dataclass(frozen=True)
class EscrowedValuation:
    """Government license valuation lodged privately before bidding.

    The amount is unreadable until :meth:`reveal` produces the post-close
    record; bidding code receives no accessor.
    """

    license_id: str
    revealed: bool
    _sealed: Money

    @classmethod
    def seal(cls, license_id: str, v_g: Money) -> "EscrowedValuation":
        return cls(license_id, False, v_g)

    @property
    def v_g(self) -> Money:
        if not self.revealed:
            raise SealedValuationError(
                f"valuation for license {self.license_id!r} is sealed until close"
            )
        return self._sealed

    def reveal(self) -> "EscrowedValuation":
        return replace(self, revealed=True)


@dataclass(frozen=True)
class ScheduleEntry:
    period: int
    revenue: Money
    payment: Money


@dataclass(frozen=True)
class PaymentSchedule:
    """Per-period revenue-share payments that stop once v_g is covered.

    Every payment is share x revenue except possibly the last, which is
    pro-rated down so the cumulative total lands on v_g exactly. If the
    revenue stream ends first, ``complete`` is False and ``shortfall``
    holds the uncovered remainder.
    """

    share_paid: Share
    entries: tuple[ScheduleEntry, ...]
    complete: bool
    shortfall: Money

    def cumulative(self) -> Money:
        total = ZERO_MONEY
        for entry in self.entries:
            total = total + entry.payment
        return total


def compute_payment_schedule(
    share: Share, revenues: Sequence[Money], v_g: Money
) -> PaymentSchedule:
    """Lay out share-of-revenue payments until the valuation is paid off."""
    entries: list[ScheduleEntry] = []
    cumulative = ZERO_MONEY
    complete = cumulative == v_g
    for period, revenue in enumerate(revenues, start=1):
        if complete:
            break
        payment = share.of(revenue)
        if cumulative + payment >= v_g:
            payment = v_g - cumulative
            complete = True
        cumulative = cumulative + payment
        entries.append(ScheduleEntry(period, Money(revenue), payment))
    return PaymentSchedule(
        share_paid=share,
        entries=tuple(entries),
        complete=complete,
        shortfall=v_g - cumulative,
    )


# --- sealed-bid price formats -------------------------------------------------


def _qualifying(ranking: Ranking, reservation: Money | None) -> Ranking:
    if reservation is None:
        return ranking
    groups = tuple(
        group for group in ranking.groups if bid_amount(group[0].bid) >= reservation
    )
    return Ranking(groups)


def _check_license(bids: Sequence, license: License) -> None:
    if bids and bids[0].license_id != license.id:
        raise ValueError(
            f"bids reference license {bids[0].license_id!r}, expected {license.id!r}"
        )


def _pick_winner(ranking: Ranking, rng: RngStream) -> tuple:
    """Winner bid from the top group, tie-broken if needed."""
    top = [rb.bid for rb in ranking.top_group()]
    if len(top) == 1:
        return top[0], False
    return break_tie(top, rng), True


def run_first_price_sealed(
    bids: Sequence[PriceBid], license: License, rng: RngStream
) -> AuctionOutcome:
    """Highest bid at or above the reservation wins and pays its own bid."""
    _check_license(bids, license)
    ranking = _qualifying(rank_bids(bids), license.reservation)
    if not ranking:
        return AuctionOutcome(license.id, None, None, None, tuple(bids))
    winner_bid, tie_broken = _pick_winner(ranking, rng)
    return AuctionOutcome(
        license_id=license.id,
        winner=winner_bid.bidder_id,
        payment=winner_bid.amount,
        winning_bid=winner_bid.amount,
        all_bids=tuple(bids),
        tie_broken=tie_broken,
    )


def run_vickrey_sealed(
    bids: Sequence[PriceBid], license: License, rng: RngStream
) -> AuctionOutcome:
    """Highest bid wins but pays the second-highest bid.

    The price floor is the reservation when one is posted, zero
    otherwise — so a single qualifying bid pays the reservation (or
    nothing at all), which is exactly the low-competition failure mode
    this laboratory exists to measure.
    """
    _check_license(bids, license)
    ranking = _qualifying(rank_bids(bids), license.reservation)
    if not ranking:
        return AuctionOutcome(license.id, None, None, None, tuple(bids))
    winner_bid, tie_broken = _pick_winner(ranking, rng)
    floor = license.reservation if license.reservation is not None else ZERO_MONEY
    second = ranking.second_amount()
    payment = floor if second is None else max(second, floor)
    return AuctionOutcome(
        license_id=license.id,
        winner=winner_bid.bidder_id,
        payment=payment,
        winning_bid=winner_bid.amount,
        all_bids=tuple(bids),
        tie_broken=tie_broken,
    )


@dataclass(frozen=True)
class ScoredBid:
    """Sealed bid carrying a fee plus quality attributes for weighted scoring."""

    bidder_id: str
    license_id: str
    attributes: ScoredAttributes


def run_scored_sealed(
    bids: Sequence[ScoredBid],
    weights: Sequence[float],
    license: License,
    rng: RngStream,
) -> AuctionOutcome:
    """Weighted-score sealed bid: fee plus three quality criteria.

    The fee component is normalized by the maximum fee bid so all four
    score components live on [0, 1]; the winner pays its own fee.
    """
    if len(weights) != 4:
        raise ValueError("weights must be (fee, speed, rural, indigenous)")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got {sum(weights)!r}")
    fee_record = tuple(
        PriceBid(b.bidder_id, b.license_id, b.attributes.license_fee) for b in bids
    )
    if not bids:
        return AuctionOutcome(license.id, None, None, None, fee_record)
    if {b.license_id for b in bids} != {license.id}:
        raise ValueError("bids reference a different license")

    w_fee, w_speed, w_rural, w_indig = weights
    max_fee = max(b.attributes.license_fee.cents for b in bids)

    def score(b: ScoredBid) -> float:
        a = b.attributes
        fee_norm = a.license_fee.cents / max_fee if max_fee > 0 else 0.0
        return (
            w_fee * fee_norm
            + w_speed * a.rollout_speed
            + w_rural * a.rural_coverage
            + w_indig * a.indigenous_content
        )

    best = max(score(b) for b in bids)
    top = [b for b in bids if score(b) == best]
    tie_broken = len(top) > 1
    winner = break_tie(top, rng) if tie_broken else top[0]
    return AuctionOutcome(
        license_id=license.id,
        winner=winner.bidder_id,
        payment=winner.attributes.license_fee,
        winning_bid=winner.attributes.license_fee,
        all_bids=fee_record,
        tie_broken=tie_broken,
    )


# --- simultaneous ascending multi-round ----------------------------------------


@dataclass(frozen=True)
class SamrConfig:
    """Round rules for the ascending format.

    The increment is either a fixed amount or a fraction of the standing
    high bid (never less than one cent). The auction closes when a full
    round produces no new bid; ``max_rounds`` is a hard stop beyond which
    the result is flagged non-terminated.
    """

    increment: Money | None = None
    increment_fraction: float | None = None
    activity_rule: str = "none"
    max_rounds: int = 10_000

    def __post_init__(self):
        if (self.increment is None) == (self.increment_fraction is None):
            raise ValueError("set exactly one of increment, increment_fraction")
        if self.increment is not None and self.increment <= ZERO_MONEY:
            raise ValueError("increment must be positive")
        if self.increment_fraction is not None and self.increment_fraction <= 0:
            raise ValueError("increment fraction must be positive")
        if self.activity_rule not in ("none", "must-act-each-round"):
            raise ValueError(f"unknown activity rule {self.activity_rule!r}")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")

    def step(self, standing: Money) -> Money:
        if self.increment is not None:
            return self.increment
        stepped = standing.scaled(self.increment_fraction)
        return max(stepped, Money("0.01"))


@dataclass(frozen=True)
class SamrAgent:
    """Straightforward bidder holding additive per-license point values."""

    bidder_id: str
    values: Mapping[str, Money]


@dataclass(frozen=True)
class RoundBidRecord:
    round_index: int
    bidder_id: str
    license_id: str
    amount: Money
    became_standing: bool


@dataclass(frozen=True)
class SamrResult:
    """Per-license outcomes plus the full round-by-round bid log."""

    outcomes: dict[str, AuctionOutcome]
    round_log: tuple[RoundBidRecord, ...]
    rounds_used: int
    terminated: bool


def _required_price(license: License, standing: Money | None, config: SamrConfig) -> Money:
    if standing is not None:
        return standing + config.step(standing)
    if license.reservation is not None:
        return license.reservation
    return config.step(ZERO_MONEY)


def run_samr(
    agents: Sequence[SamrAgent],
    licenses: Sequence[License],
    config: SamrConfig,
    rng: RngStream,
) -> SamrResult:
    """Simultaneous ascending rounds under straightforward bidding.

    Each round, every eligible agent that is not the standing high bidder
    on a license bids the required price (standing plus increment, or the
    opening price) on the license offering its largest non-negative
    surplus. When several agents hit the same required price in one
    round, the standing goes to the higher-valued agent; a seeded draw
    decides only exact value ties. The auction closes on the first quiet
    round.
    """
    if len({lic.id for lic in licenses}) != len(licenses):
        raise ValueError("duplicate license ids")
    if len({a.bidder_id for a in agents}) != len(agents):
        raise ValueError("duplicate bidder ids")

    standing: dict[str, tuple[str, Money]] = {}
    bids_seen: dict[str, list[PriceBid]] = {lic.id: [] for lic in licenses}
    tie_flags: dict[str, bool] = {lic.id: False for lic in licenses}
    values_of: dict[str, Mapping[str, Money]] = {a.bidder_id: a.values for a in agents}
    eligible = [a.bidder_id for a in agents]
    log: list[RoundBidRecord] = []
    by_license = {lic.id: lic for lic in licenses}

    rounds = 0
    terminated = False
    while rounds < config.max_rounds:
        rounds += 1
        proposals: dict[str, list[str]] = {}
        required_at: dict[str, Money] = {}
        for bidder in eligible:
            values = values_of[bidder]
            best: tuple[Decimal, str] | None = None
            for lic_id in sorted(values):
                lic = by_license.get(lic_id)
                if lic is None:
                    continue
                held = standing.get(lic_id)
                if held is not None and held[0] == bidder:
                    continue
                required = _required_price(lic, held[1] if held else None, config)
                surplus = values[lic_id].amount - required.amount
                if surplus < 0:
                    continue
                if best is None or surplus > best[0]:
                    best = (surplus, lic_id)
                    required_at[lic_id] = required
            if best is not None:
                proposals.setdefault(best[1], []).append(bidder)

        if not proposals:
            terminated = True
            break

        for lic_id in sorted(proposals):
            price = required_at[lic_id]
            contenders = proposals[lic_id]
            top_value = max(values_of[b][lic_id] for b in contenders)
            top = [b for b in contenders if values_of[b][lic_id] == top_value]
            if len(top) > 1:
                pick = break_tie(
                    [PriceBid(b, lic_id, price) for b in top], rng
                ).bidder_id
                tie_flags[lic_id] = True
            else:
                pick = top[0]
            standing[lic_id] = (pick, price)
            for bidder in contenders:
                bids_seen[lic_id].append(PriceBid(bidder, lic_id, price))
                log.append(
                    RoundBidRecord(rounds, bidder, lic_id, price, bidder == pick)
                )

        if config.activity_rule == "must-act-each-round":
            holders = {holder for holder, _ in standing.values()}
            active = holders | {b for bs in proposals.values() for b in bs}
            eligible = [b for b in eligible if b in active]

    outcomes = {}
    for lic in licenses:
        held = standing.get(lic.id)
        if held is None:
            outcomes[lic.id] = AuctionOutcome(
                lic.id, None, None, None, tuple(bids_seen[lic.id]), rounds_used=rounds
            )
        else:
            holder, price = held
            outcomes[lic.id] = AuctionOutcome(
                license_id=lic.id,
                winner=holder,
                payment=price,
                winning_bid=price,
                all_bids=tuple(bids_seen[lic.id]),
                rounds_used=rounds,
                tie_broken=tie_flags[lic.id],
            )
    return SamrResult(outcomes, tuple(log), rounds, terminated)


# --- revenue-share auction ------------------------------------------------------


@dataclass(frozen=True)
class ShareAuctionResult:
    outcome: AuctionOutcome
    schedule: PaymentSchedule | None
    escrow: EscrowedValuation


def run_share_auction(
    share_bids: Sequence[ShareBid],
    escrow: EscrowedValuation,
    revenues: Sequence[Money],
    rng: RngStream,
) -> ShareAuctionResult:
    """Bidders bid revenue shares; the winner pays the second-highest share.

    The government's valuation stays sealed through winner determination
    and is revealed only to terminate the payment schedule. A sole bidder
    pays share zero, mirroring the second-price rule's missing floor.
    """
    if escrow.revealed:
        raise ValueError("escrowed valuation must still be sealed at bid time")
    ranking = rank_bids(share_bids)
    if not ranking:
        return ShareAuctionResult(
            AuctionOutcome(escrow.license_id, None, None, None, tuple(share_bids)),
            None,
            escrow,
        )
    winner_bid, tie_broken = _pick_winner(ranking, rng)
    second = ranking.second_amount()
    share_paid = second if second is not None else ZERO_SHARE
    revealed = escrow.reveal()
    schedule = compute_payment_schedule(share_paid, revenues, revealed.v_g)
    outcome = AuctionOutcome(
        license_id=escrow.license_id,
        winner=winner_bid.bidder_id,
        payment=share_paid,
        winning_bid=winner_bid.share,
        all_bids=tuple(share_bids),
        tie_broken=tie_broken,
    )
    return ShareAuctionResult(outcome, schedule, revealed)


# --- default cascade -------------------------------------------------------------


def resolve_default_cascade(
    outcome: AuctionOutcome,
    affordability: Mapping[str, Money],
    penalty_fraction: float,
    license: License,
) -> AuctionOutcome:
    """Walk down the bid ladder when winners cannot pay.

    While the current winner's required payment exceeds their ceiling,
    they default, pay a penalty of ``penalty_fraction`` times their bid,
    and the next-highest bidder is promoted at that bidder's *own* bid.
    If everyone defaults the license goes unsold. Bidders without a
    listed ceiling are assumed able to pay.
    """
    if not 0 <= penalty_fraction <= 1:
        raise ValueError("penalty fraction must be in [0, 1]")
    if outcome.winner is None or not isinstance(outcome.payment, Money):
        return outcome

    ranked = [
        rb.bid
        for rb in rank_bids(outcome.all_bids).flattened()
        if license.reservation is None or rb.bid.amount >= license.reservation
    ]
    try:
        position = next(
            i
            for i, bid in enumerate(ranked)
            if bid.bidder_id == outcome.winner and bid.amount == outcome.winning_bid
        )
    except StopIteration:
        raise ValueError("outcome winner does not appear in its own bid record")

    trace: list[DefaultRecord] = list(outcome.default_trace)
    defaulted: set[str] = set()
    winner: str | None = outcome.winner
    winning_bid = outcome.winning_bid
    payment: Money | None = outcome.payment

    while winner is not None:
        ceiling = affordability.get(winner)
        if ceiling is None or payment <= ceiling:
            break
        bid = ranked[position].amount
        trace.append(DefaultRecord(winner, bid, bid.scaled(penalty_fraction)))
        defaulted.add(winner)
        position += 1
        while position < len(ranked) and ranked[position].bidder_id in defaulted:
            position += 1
        if position >= len(ranked):
            winner, winning_bid, payment = None, None, None
        else:
            winner = ranked[position].bidder_id
            winning_bid = ranked[position].amount
            payment = ranked[position].amount

    return replace(
        outcome,
        winner=winner,
        winning_bid=winning_bid,
        payment=payment,
        default_trace=tuple(trace),
    )
