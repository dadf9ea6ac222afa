"""Scenario definition and repeated-trial simulation with seed discipline.

Trial t draws everything it needs from a stream derived as
(master_seed, "trial", t), and summaries are aggregated in trial-index
order, so serial and parallel executions of the same scenario produce
byte-identical results.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from typing import Any, Callable, Sequence

import numpy as np

from . import agents as strategies
from .core import (
    BidderProfile,
    CommonValueSignal,
    License,
    LicenseGroup,
    Money,
    PointValue,
    PriceBid,
    RngStream,
    ScoredAttributes,
    Share,
    ShareBid,
    ValueDistribution,
    ZERO_MONEY,
)
from .mechanisms import (
    AuctionOutcome,
    EscrowedValuation,
    PaymentSchedule,
    SamrAgent,
    SamrConfig,
    ScoredBid,
    run_first_price_sealed,
    run_samr,
    run_scored_sealed,
    run_share_auction,
    run_vickrey_sealed,
)

MECHANISMS = ("fpsb", "vickrey", "scored", "samr", "share")

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Invalid scenario; carries every violation found, not just the first."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid scenario:\n" + "\n".join(f"  - {v}" for v in self.violations))


@dataclass(frozen=True)
class ShareConfig:
    """Escrowed valuation plus the per-period revenue model for share auctions."""

    v_g: Money
    revenues: tuple[Money, ...]
    rate: float = 0.0

    def __post_init__(self):
        if not self.revenues:
            raise ValueError("share auction needs at least one revenue period")
        if self.rate < 0:
            raise ValueError("discount rate must be non-negative")

    def total_revenue(self) -> Money:
        total = ZERO_MONEY
        for r in self.revenues:
            total = total + r
        return total


@dataclass(frozen=True)
class ScenarioContext:
    """Optional money-side context consumed by axiom scorecards."""

    v_g: Money | None = None
    rollout_cost: Money | None = None
    upfront_fee: Money | None = None


@dataclass(frozen=True)
class Scenario:
    mechanism: str
    licenses: tuple[License, ...]
    bidders: tuple[BidderProfile, ...]
    trials: int = 1
    master_seed: int = 42
    weights: tuple[float, float, float, float] | None = None
    samr: SamrConfig | None = None
    share: ShareConfig | None = None
    common_value: ValueDistribution | None = None
    context: ScenarioContext | None = None

    def validate(self) -> list[str]:
        """All violations, empty when the scenario is runnable."""
        bad: list[str] = []
        if self.mechanism not in MECHANISMS:
            bad.append(f"mechanism: unknown {self.mechanism!r}, expected one of {MECHANISMS}")
        if self.trials < 1:
            bad.append(f"trials: must be at least 1 (got {self.trials})")
        if not 0 <= self.master_seed < 2**64:
            bad.append("seed: must be a 64-bit unsigned integer")
        if not self.licenses:
            bad.append("licenses: at least one license is required")
        if len({l.id for l in self.licenses}) != len(self.licenses):
            bad.append("licenses: duplicate license ids")
        if len({b.id for b in self.bidders}) != len(self.bidders):
            bad.append("bidders: duplicate bidder ids")
        if self.mechanism in ("fpsb", "vickrey", "scored", "share") and len(self.licenses) > 1:
            bad.append(f"licenses: {self.mechanism} scenarios take exactly one license")
        if self.mechanism == "scored":
            if self.weights is None:
                bad.append("config.weights: required for scored scenarios")
            for b in self.bidders:
                if b.attributes is None:
                    bad.append(f"bidders[{b.id}].attributes: required for scored scenarios")
        if self.weights is not None:
            if any(w < 0 for w in self.weights):
                bad.append("config.weights: weights must be non-negative")
            elif abs(sum(self.weights) - 1.0) > 1e-9:
                bad.append(f"config.weights: must sum to 1, got {sum(self.weights)!r}")
        if self.mechanism == "samr":
            if self.samr is None:
                bad.append("config.samr: required for samr scenarios")
            for b in self.bidders:
                if not isinstance(b.value_model, PointValue):
                    bad.append(f"bidders[{b.id}].value: samr agents need point values")
        if self.mechanism == "share":
            if self.share is None:
                bad.append("config.share: required for share scenarios")
            for b in self.bidders:
                if isinstance(b.value_model, CommonValueSignal):
                    bad.append(f"bidders[{b.id}].value: share bidders need a money value")
        needs_common = any(isinstance(b.value_model, CommonValueSignal) for b in self.bidders)
        if needs_common and self.common_value is None:
            bad.append("config.common_value: required when any bidder holds a signal model")
        for b in self.bidders:
            strat = b.strategy
            if strat not in _STRATEGIES:
                bad.append(f"bidders[{b.id}].strategy: unknown {strat!r}")
            if strat == "shaded":
                gamma = b.param("gamma")
                if gamma is None or not 0 <= gamma < 1:
                    bad.append(f"bidders[{b.id}].params.gamma: shaded needs gamma in [0, 1)")
            if strat == "certainty-equivalent" and not isinstance(b.value_model, ValueDistribution):
                bad.append(f"bidders[{b.id}].value: certainty-equivalent needs a distribution")
            if strat in ("common-naive", "common-corrected") and not isinstance(
                b.value_model, CommonValueSignal
            ):
                bad.append(f"bidders[{b.id}].value: {strat} needs a common-value signal model")
        return bad

    def check(self) -> None:
        violations = self.validate()
        if violations:
            raise ScenarioError(violations)


_STRATEGIES = (
    "auto",
    "truthful",
    "shaded",
    "equilibrium-fpsb",
    "budget",
    "certainty-equivalent",
    "common-naive",
    "common-corrected",
)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    sold: bool
    revenue: float
    rounds: int
    winner: str | None = None
    efficient: bool | None = None
    cursed: bool | None = None
    surplus: float | None = None


@dataclass(frozen=True)
class MetricsSummary:
    """Aggregates over a scenario's trials.

    Surplus, efficiency and curse rates are taken over sold trials only;
    unsold trials are reported through ``unsold_rate`` rather than
    silently dragging the means.
    """

    trials: int
    mean_revenue: float
    revenue_se: float
    efficiency_rate: float
    winners_curse_rate: float
    mean_winner_surplus: float
    mean_rounds: float
    unsold_rate: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "trials": self.trials,
            "mean_revenue": self.mean_revenue,
            "revenue_se": self.revenue_se,
            "efficiency_rate": self.efficiency_rate,
            "winners_curse_rate": self.winners_curse_rate,
            "mean_winner_surplus": self.mean_winner_surplus,
            "mean_rounds": self.mean_rounds,
            "unsold_rate": self.unsold_rate,
        }


def winner_surplus(
    outcome: AuctionOutcome,
    realized_value: Money,
    schedule: PaymentSchedule | None = None,
    rate: float = 0.0,
) -> Decimal:
    """Signed winner surplus: realized value minus what winning cost.

    Price mechanisms: value - payment (negative means the winner was
    cursed). Share auctions: the change against a zero-share baseline,
    i.e. minus the (discounted) schedule payments; pass the schedule.
    Unsold outcomes have no winner surplus and raise.
    """
    if outcome.winner is None:
        raise ValueError("winner surplus is undefined for an unsold outcome")
    if isinstance(outcome.payment, Money):
        return realized_value.amount - outcome.payment.amount
    if schedule is None:
        raise ValueError("share-auction surplus needs the payment schedule")
    if rate == 0.0:
        return -schedule.cumulative().amount
    pv = sum(
        e.payment.as_float() / (1.0 + rate) ** e.period for e in schedule.entries
    )
    return -Decimal(repr(pv))


# --- trial execution -----------------------------------------------------------


def _resolved_strategy(scenario: Scenario, profile: BidderProfile) -> str:
    if profile.strategy != "auto":
        return profile.strategy
    if isinstance(profile.value_model, CommonValueSignal):
        return "common-naive"
    if scenario.mechanism == "fpsb" and all(
        isinstance(b.value_model, ValueDistribution) and b.value_model.family == "uniform"
        for b in scenario.bidders
    ):
        return "equilibrium-fpsb"
    return "truthful"


def _realized_values(scenario: Scenario, trial: RngStream) -> tuple[list[float], list[float]]:
    """Per-bidder (realized value, observed signal-or-value) for one trial."""
    common = None
    if scenario.common_value is not None:
        common = scenario.common_value.sample(trial.child("common-value"))
    values: list[float] = []
    observed: list[float] = []
    for i, b in enumerate(scenario.bidders):
        model = b.value_model
        if isinstance(model, PointValue):
            v = model.amount.as_float()
            values.append(v)
            observed.append(v)
        elif isinstance(model, ValueDistribution):
            v = model.sample(trial.child("value", i))
            values.append(v)
            observed.append(v)
        else:
            if common is None:
                raise ScenarioError(["config.common_value: required for signal bidders"])
            noise = float(trial.child("signal", i).generator().normal(0.0, model.noise_sd))
            values.append(common)
            observed.append(common + noise)
    return values, observed


def _price_bid(
    scenario: Scenario,
    profile: BidderProfile,
    observed: float,
    trial: RngStream,
) -> Money:
    strat = _resolved_strategy(scenario, profile)
    n = len(scenario.bidders)
    if strat in ("truthful", "budget"):
        bid = strategies.truthful_bid(Money.from_float(max(0.0, observed)))
    elif strat == "shaded":
        bid = strategies.shaded_bid(
            Money.from_float(max(0.0, observed)), profile.param("gamma", 0.0)
        )
    elif strat == "equilibrium-fpsb":
        bid = Money.from_float(strategies.equilibrium_fpsb_bid(observed, n))
    elif strat == "certainty-equivalent":
        bid = strategies.certainty_equivalent_bid(
            profile.value_model, profile.risk_coefficient, trial
        )
    elif strat in ("common-naive", "common-corrected"):
        mode = "naive" if strat == "common-naive" else "corrected"
        bid = strategies.common_value_bid(
            Money.from_float(max(0.0, observed)),
            mode,
            n,
            profile.value_model.noise_sd,
            trial,
        )
    else:  # pragma: no cover - guarded by validation
        raise ScenarioError([f"bidders[{profile.id}].strategy: unknown {strat!r}"])
    if profile.budget is not None:
        bid = strategies.budget_constrained_bid(bid, profile.budget)
    return bid


def _run_sealed_trial(scenario: Scenario, t: int, trial: RngStream) -> TrialRecord:
    lic = scenario.licenses[0]
    values, observed = _realized_values(scenario, trial)
    bids = [
        PriceBid(b.id, lic.id, _price_bid(scenario, b, observed[i], trial))
        for i, b in enumerate(scenario.bidders)
    ]
    if scenario.mechanism == "fpsb":
        outcome = run_first_price_sealed(bids, lic, trial)
    else:
        outcome = run_vickrey_sealed(bids, lic, trial)
    return _record_from_price_outcome(scenario, t, outcome, values)


def _run_scored_trial(scenario: Scenario, t: int, trial: RngStream) -> TrialRecord:
    lic = scenario.licenses[0]
    values, _ = _realized_values(scenario, trial)
    bids = [ScoredBid(b.id, lic.id, b.attributes) for b in scenario.bidders]
    outcome = run_scored_sealed(bids, scenario.weights, lic, trial)
    return _record_from_price_outcome(scenario, t, outcome, values)


def _record_from_price_outcome(
    scenario: Scenario, t: int, outcome: AuctionOutcome, values: list[float]
) -> TrialRecord:
    if not outcome.sold:
        return TrialRecord(t, False, 0.0, outcome.rounds_used)
    index = {b.id: i for i, b in enumerate(scenario.bidders)}
    winner_value = values[index[outcome.winner]]
    payment = outcome.payment.as_float()
    return TrialRecord(
        trial=t,
        sold=True,
        revenue=payment,
        rounds=outcome.rounds_used,
        winner=outcome.winner,
        efficient=winner_value == max(values),
        cursed=payment > winner_value,
        surplus=winner_value - payment,
    )


def _run_samr_trial(scenario: Scenario, t: int, trial: RngStream) -> TrialRecord:
    samr_agents = [
        SamrAgent(b.id, {lic.id: b.value_model.amount for lic in scenario.licenses})
        for b in scenario.bidders
    ]
    result = run_samr(samr_agents, scenario.licenses, scenario.samr, trial)
    revenue = 0.0
    surplus = 0.0
    sold_any = False
    efficient = True
    cursed = False
    values = {b.id: b.value_model.amount.as_float() for b in scenario.bidders}
    best = max(values.values()) if values else 0.0
    for outcome in result.outcomes.values():
        if not outcome.sold:
            continue
        sold_any = True
        payment = outcome.payment.as_float()
        revenue += payment
        winner_value = values[outcome.winner]
        surplus += winner_value - payment
        efficient = efficient and winner_value == best
        cursed = cursed or payment > winner_value
    if not sold_any:
        return TrialRecord(t, False, 0.0, result.rounds_used)
    return TrialRecord(
        trial=t,
        sold=True,
        revenue=revenue,
        rounds=result.rounds_used,
        efficient=efficient,
        cursed=cursed,
        surplus=surplus,
    )


def _run_share_trial(scenario: Scenario, t: int, trial: RngStream) -> TrialRecord:
    cfg = scenario.share
    lic = scenario.licenses[0]
    values, observed = _realized_values(scenario, trial)
    total = cfg.total_revenue().as_float()
    bids = []
    for i, b in enumerate(scenario.bidders):
        share = 0.0 if total <= 0 else min(1.0, max(0.0, observed[i]) / total)
        bids.append(ShareBid(b.id, lic.id, Share.from_float(share)))
    escrow = EscrowedValuation.seal(lic.id, cfg.v_g)
    result = run_share_auction(bids, escrow, cfg.revenues, trial)
    outcome = result.outcome
    if not outcome.sold:
        return TrialRecord(t, False, 0.0, outcome.rounds_used)
    index = {b.id: i for i, b in enumerate(scenario.bidders)}
    winner_value = values[index[outcome.winner]]
    paid = result.schedule.cumulative().as_float()
    return TrialRecord(
        trial=t,
        sold=True,
        revenue=paid,
        rounds=outcome.rounds_used,
        winner=outcome.winner,
        efficient=winner_value == max(values),
        cursed=paid > winner_value,
        surplus=float(
            winner_surplus(outcome, Money.from_float(max(0.0, winner_value)),
                           result.schedule, cfg.rate)
        ),
    )


_TRIAL_RUNNERS: dict[str, Callable[[Scenario, int, RngStream], TrialRecord]] = {
    "fpsb": _run_sealed_trial,
    "vickrey": _run_sealed_trial,
    "scored": _run_scored_trial,
    "samr": _run_samr_trial,
    "share": _run_share_trial,
}


def run_trials(
    scenario: Scenario,
    seed: int | None = None,
    workers: int = 1,
    keep_log: bool = False,
):
    """Run every trial of a scenario and aggregate the metrics.

    The per-trial stream is derived from (seed, "trial", t), and records
    are reduced in trial order whatever the execution order, so the
    summary is identical for any ``workers`` setting.
    """
    scenario.check()
    master = scenario.master_seed if seed is None else seed
    root = RngStream(master)
    runner = _TRIAL_RUNNERS[scenario.mechanism]

    def one(t: int) -> TrialRecord:
        return runner(scenario, t, root.child("trial", t))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(scenario.trials)))
    else:
        records = [one(t) for t in range(scenario.trials)]

    summary = _aggregate(records)
    if keep_log:
        return summary, records
    return summary


def _aggregate(records: list[TrialRecord]) -> MetricsSummary:
    n = len(records)
    revenues = np.array([r.revenue for r in records], dtype=float)
    sold = [r for r in records if r.sold]
    se = float(revenues.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return MetricsSummary(
        trials=n,
        mean_revenue=float(revenues.mean()) if n else 0.0,
        revenue_se=se,
        efficiency_rate=(
            sum(1 for r in sold if r.efficient) / len(sold) if sold else 0.0
        ),
        winners_curse_rate=(
            sum(1 for r in sold if r.cursed) / len(sold) if sold else 0.0
        ),
        mean_winner_surplus=(
            sum(r.surplus for r in sold) / len(sold) if sold else 0.0
        ),
        mean_rounds=(sum(r.rounds for r in records) / n if n else 0.0),
        unsold_rate=(n - len(sold)) / n if n else 0.0,
    )


# --- scenario files -------------------------------------------------------------


def _parse_money(value: Any, where: str, bad: list[str]) -> Money | None:
    try:
        if isinstance(value, float):
            return Money.from_float(value)
        return Money(value)
    except (ValueError, TypeError, ArithmeticError) as exc:
        bad.append(f"{where}: {exc}")
        return None


def _reject_unknown(data: Any, allowed: set[str], where: str, bad: list[str]) -> bool:
    """Flag unknown keys; returns False when data is not an object at all."""
    if not isinstance(data, dict):
        bad.append(f"{where}: expected an object")
        return False
    unknown = set(data) - allowed
    for key in sorted(unknown):
        bad.append(f"{where}.{key}: unknown key")
    return True


def _parse_value_model(data: Any, where: str, bad: list[str]):
    if not isinstance(data, dict) or "kind" not in data:
        bad.append(f"{where}: expected an object with a 'kind'")
        return None
    kind = data["kind"]
    try:
        if kind == "point":
            _reject_unknown(data, {"kind", "amount"}, where, bad)
            amount = _parse_money(data.get("amount", 0), f"{where}.amount", bad)
            return PointValue(amount) if amount is not None else None
        if kind == "uniform":
            _reject_unknown(data, {"kind", "low", "high"}, where, bad)
            return ValueDistribution.uniform(data.get("low", 0.0), data.get("high", 1.0))
        if kind == "normal":
            _reject_unknown(data, {"kind", "mean", "sd"}, where, bad)
            return ValueDistribution.normal(data.get("mean", 0.0), data.get("sd", 1.0))
        if kind == "common-signal":
            _reject_unknown(data, {"kind", "noise_sd"}, where, bad)
            return CommonValueSignal(float(data.get("noise_sd", 0.0)))
    except (ValueError, TypeError) as exc:
        bad.append(f"{where}: {exc}")
        return None
    bad.append(f"{where}.kind: unknown value model {kind!r}")
    return None


def _parse_common_value(data: Any, where: str, bad: list[str]) -> ValueDistribution | None:
    model = _parse_value_model(data, where, bad)
    if model is None:
        return None
    if isinstance(model, PointValue):
        return ValueDistribution.point(model.amount.as_float())
    if isinstance(model, ValueDistribution):
        return model
    bad.append(f"{where}: common value must be a point or distribution")
    return None


def scenario_from_dict(data: dict) -> Scenario:
    """Build a scenario from a parsed file, collecting every violation."""
    bad: list[str] = []
    if not isinstance(data, dict):
        raise ScenarioError(["scenario: expected a JSON object"])
    _reject_unknown(
        data,
        {"version", "mechanism", "trials", "seed", "licenses", "bidders",
         "config", "context", "metrics"},
        "scenario",
        bad,
    )
    if data.get("version") != SCHEMA_VERSION:
        bad.append(f"version: expected {SCHEMA_VERSION}, got {data.get('version')!r}")
    mechanism = data.get("mechanism", "")
    trials = data.get("trials", 1)
    if not isinstance(trials, int) or isinstance(trials, bool):
        bad.append(f"trials: expected an integer, got {trials!r}")
        trials = 1
    seed = data.get("seed", 42)
    if not isinstance(seed, int) or isinstance(seed, bool):
        bad.append(f"seed: expected an integer, got {seed!r}")
        seed = 42

    raw_licenses = data.get("licenses", [])
    if not isinstance(raw_licenses, list):
        bad.append("licenses: expected a list")
        raw_licenses = []
    licenses: list[License] = []
    for i, entry in enumerate(raw_licenses):
        where = f"licenses[{i}]"
        if not isinstance(entry, dict):
            bad.append(f"{where}: expected an object")
            continue
        _reject_unknown(entry, {"id", "label", "group", "reservation"}, where, bad)
        reservation = None
        if entry.get("reservation") is not None:
            reservation = _parse_money(entry["reservation"], f"{where}.reservation", bad)
        try:
            group = LicenseGroup(entry.get("group", "none"))
        except ValueError:
            bad.append(f"{where}.group: expected one of A, B, C, none")
            group = LicenseGroup.NONE
        licenses.append(
            License(str(entry.get("id", f"L{i}")), str(entry.get("label", "")), group, reservation)
        )

    raw_bidders = data.get("bidders", [])
    if not isinstance(raw_bidders, list):
        bad.append("bidders: expected a list")
        raw_bidders = []
    bidders: list[BidderProfile] = []
    for i, entry in enumerate(raw_bidders):
        where = f"bidders[{i}]"
        if not isinstance(entry, dict):
            bad.append(f"{where}: expected an object")
            continue
        _reject_unknown(
            entry,
            {"id", "value", "strategy", "budget", "risk_coefficient", "params", "attributes"},
            where,
            bad,
        )
        model = _parse_value_model(entry.get("value"), f"{where}.value", bad)
        budget = None
        if entry.get("budget") is not None:
            budget = _parse_money(entry["budget"], f"{where}.budget", bad)
        attributes = None
        if entry.get("attributes") is not None:
            attr = entry["attributes"]
            if _reject_unknown(
                attr,
                {"license_fee", "rollout_speed", "rural_coverage", "indigenous_content"},
                f"{where}.attributes",
                bad,
            ):
                fee = _parse_money(
                    attr.get("license_fee", 0), f"{where}.attributes.license_fee", bad
                )
                try:
                    attributes = ScoredAttributes(
                        fee if fee is not None else ZERO_MONEY,
                        float(attr.get("rollout_speed", 0.0)),
                        float(attr.get("rural_coverage", 0.0)),
                        float(attr.get("indigenous_content", 0.0)),
                    )
                except ValueError as exc:
                    bad.append(f"{where}.attributes: {exc}")
        params = entry.get("params", {})
        if not isinstance(params, dict):
            bad.append(f"{where}.params: expected an object")
            params = {}
        try:
            bidders.append(
                BidderProfile(
                    id=str(entry.get("id", f"b{i}")),
                    value_model=model if model is not None else PointValue(ZERO_MONEY),
                    budget=budget,
                    risk_coefficient=float(entry.get("risk_coefficient", 0.0)),
                    strategy=str(entry.get("strategy", "auto")),
                    attributes=attributes,
                    strategy_params=tuple(sorted((k, float(v)) for k, v in params.items())),
                )
            )
        except (ValueError, TypeError) as exc:
            bad.append(f"{where}: {exc}")

    config = data.get("config", {})
    weights = None
    samr = None
    share = None
    common_value = None
    if not isinstance(config, dict):
        bad.append("config: expected an object")
    else:
        _reject_unknown(config, {"weights", "samr", "share", "common_value"}, "config", bad)
        if "weights" in config:
            raw = config["weights"]
            try:
                if not isinstance(raw, list) or len(raw) != 4:
                    raise TypeError
                weights = tuple(float(w) for w in raw)
            except (TypeError, ValueError):
                bad.append("config.weights: expected a list of 4 numbers")
        if "samr" in config and _reject_unknown(
            config["samr"],
            {"increment", "increment_fraction", "activity_rule", "max_rounds"},
            "config.samr",
            bad,
        ):
            entry = config["samr"]
            increment = None
            if entry.get("increment") is not None:
                increment = _parse_money(entry["increment"], "config.samr.increment", bad)
            try:
                samr = SamrConfig(
                    increment=increment,
                    increment_fraction=entry.get("increment_fraction"),
                    activity_rule=str(entry.get("activity_rule", "none")),
                    max_rounds=int(entry.get("max_rounds", 10_000)),
                )
            except (ValueError, TypeError) as exc:
                bad.append(f"config.samr: {exc}")
        if "share" in config and _reject_unknown(
            config["share"], {"v_g", "revenues", "rate"}, "config.share", bad
        ):
            entry = config["share"]
            v_g = _parse_money(entry.get("v_g", 0), "config.share.v_g", bad)
            revenues = []
            for j, r in enumerate(entry.get("revenues", [])):
                m = _parse_money(r, f"config.share.revenues[{j}]", bad)
                if m is not None:
                    revenues.append(m)
            try:
                share = ShareConfig(
                    v_g if v_g is not None else ZERO_MONEY,
                    tuple(revenues),
                    float(entry.get("rate", 0.0)),
                )
            except (ValueError, TypeError) as exc:
                bad.append(f"config.share: {exc}")
        if "common_value" in config:
            common_value = _parse_common_value(
                config["common_value"], "config.common_value", bad
            )

    context = None
    if data.get("context") is not None and _reject_unknown(
        data["context"], {"v_g", "rollout_cost", "upfront_fee"}, "context", bad
    ):
        entry = data["context"]
        context = ScenarioContext(
            v_g=_parse_money(entry["v_g"], "context.v_g", bad) if "v_g" in entry else None,
            rollout_cost=(
                _parse_money(entry["rollout_cost"], "context.rollout_cost", bad)
                if "rollout_cost" in entry
                else None
            ),
            upfront_fee=(
                _parse_money(entry["upfront_fee"], "context.upfront_fee", bad)
                if "upfront_fee" in entry
                else None
            ),
        )

    _reject_unknown(data.get("metrics", {}), {"log"}, "metrics", bad)

    scenario = Scenario(
        mechanism=str(mechanism),
        licenses=tuple(licenses),
        bidders=tuple(bidders),
        trials=trials,
        master_seed=seed,
        weights=weights,
        samr=samr,
        share=share,
        common_value=common_value,
        context=context,
    )
    bad.extend(scenario.validate())
    if bad:
        raise ScenarioError(bad)
    return scenario
