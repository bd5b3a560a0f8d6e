"""Equal-rate time allocation, receiver pairing and plan construction.

Every receiver gets a time fraction such that all time-averaged rates are
identical.  With per-receiver rates R_i the unique solution is
``t_i = (1/R_i) / sum_j (1/R_j)`` and the common average rate is the
inverse harmonic sum ``R = 1 / sum_j (1/R_j)`` (the product form
``t_i = prod_{k != i} R_k / sum_j prod_{k != j} R_k`` is the same thing).

For hierarchical-modulation plans the receivers are grouped in pairs.  A
pair on air delivers its region's equal-rate value R_pair to both members
simultaneously, so a member that nominally owns half of the pair's airtime
is booked at the equivalent exclusive-time rate ``2 * R_pair``; the common
average then equals the inverse harmonic sum over pair rates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DegenerateReceiverError, GroupSizeError, InvalidParameterError
from .rate_region import (
    EqualRateSolution,
    RatePoint,
    achievable_points,
    best_single_modcod,
    equal_rate_point,
    upper_hull,
)
from .thresholds import ModCod, ModCodTable

EXHAUSTIVE_LIMIT = 12

MODE_AUTO = "auto"
MODE_EXHAUSTIVE = "exhaustive"
MODE_HEURISTIC = "heuristic"


@dataclass(frozen=True)
class Receiver:
    id: str
    snr_db: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.snr_db):
            raise InvalidParameterError(f"receiver {self.id}: SNR must be finite")


@dataclass(frozen=True)
class Grouping:
    """A partition of the receivers into pairs (plus one singleton if n is odd)."""

    pairs: tuple[tuple[Receiver, Receiver], ...]
    singleton: Receiver | None = None

    def receivers(self) -> tuple[Receiver, ...]:
        out = [r for pair in self.pairs for r in pair]
        if self.singleton is not None:
            out.append(self.singleton)
        return tuple(out)

    def snr_key(self) -> tuple:
        """Multiset of per-pair SNR multisets; groupings with equal keys perform equally."""
        pair_key = tuple(sorted(tuple(sorted((a.snr_db, b.snr_db))) for a, b in self.pairs))
        return (pair_key, None if self.singleton is None else self.singleton.snr_db)

    def total_snr_spread(self) -> float:
        return sum(abs(a.snr_db - b.snr_db) for a, b in self.pairs)

    def describe(self) -> str:
        parts = [f"({a.snr_db:g}|{b.snr_db:g})" for a, b in sorted(
            ((min(p, key=lambda r: r.snr_db), max(p, key=lambda r: r.snr_db)) for p in self.pairs),
            key=lambda p: (p[0].snr_db, p[1].snr_db),
        )]
        if self.singleton is not None:
            parts.append(f"({self.singleton.snr_db:g})")
        return " ".join(parts)


@dataclass(frozen=True)
class ScheduleEntry:
    """One transmission slot: which receivers it serves, with what, for how long."""

    receiver_ids: tuple[str, ...]
    modcods: tuple[ModCod, ...]
    time_fraction: float

    def alpha(self) -> float | None:
        for mc in self.modcods:
            if mc.alpha is not None:
                return mc.alpha
        return None

    def stream_rates(self) -> tuple[float, ...]:
        return tuple(mc.spectral_rate for mc in self.modcods)


@dataclass(frozen=True)
class Plan:
    """An equal-rate transmission plan.

    ``rates[i]`` is the equivalent exclusive-time rate used by the
    allocation (the modcod rate for solo receivers, twice the pair's
    equal-rate value for paired ones), so ``fractions[i] * rates[i]`` is the
    common average rate for every receiver.
    """

    receivers: tuple[Receiver, ...]
    rates: dict[str, float]
    fractions: dict[str, float]
    common_rate: float
    schedule: tuple[ScheduleEntry, ...]
    grouping: Grouping | None = None


def time_fractions(rates: Sequence[float], weights: Sequence[float] | None = None) -> list[float]:
    """Time fractions equalizing the weighted average rate across receivers.

    With unit weights (the default policy) receiver i gets
    ``(1/R_i) / sum_j (1/R_j)`` of the time.

    Raises:
        DegenerateReceiverError: if any rate is not strictly positive.
    """
    if weights is None:
        weights = [1.0] * len(rates)
    if len(weights) != len(rates):
        raise InvalidParameterError("weights and rates must have the same length")
    bad = [i for i, r in enumerate(rates) if r <= 0.0]
    if bad:
        raise DegenerateReceiverError(
            f"rates must be positive, offending indices: {bad}",
            receiver_ids=tuple(str(i) for i in bad),
        )
    inv = [w / r for w, r in zip(weights, rates)]
    total = sum(inv)
    return [x / total for x in inv]


def equal_rate(rates: Sequence[float]) -> float:
    """Common average rate of the equal-rate policy: the inverse harmonic sum."""
    fractions = time_fractions(rates)
    return fractions[0] * rates[0]


def pair_equal_rate(
    snr_a_db: float, snr_b_db: float, table: ModCodTable, hierarchical: bool = True
) -> EqualRateSolution:
    """Equal-rate solution of one receiver pair's achievable region."""
    lo, hi = sorted((snr_a_db, snr_b_db))
    points = achievable_points(lo, hi, table)
    if not hierarchical:
        points = [p for p in points if p.kind != "hierarchical"]
    return equal_rate_point(upper_hull(points))


def classical_plan(receivers: Sequence[Receiver], table: ModCodTable) -> Plan:
    """Time-sharing plan where every receiver uses its best full-symbol modcod."""
    receivers = tuple(receivers)
    chosen: dict[str, ModCod] = {}
    undecodable = []
    for r in receivers:
        mc = best_single_modcod(r.snr_db, table)
        if mc is None:
            undecodable.append(r.id)
        else:
            chosen[r.id] = mc
    if undecodable:
        raise DegenerateReceiverError(
            f"receivers decode no modcod: {', '.join(undecodable)}",
            receiver_ids=tuple(undecodable),
        )
    rates = {r.id: chosen[r.id].spectral_rate for r in receivers}
    fracs = time_fractions([rates[r.id] for r in receivers])
    fractions = {r.id: f for r, f in zip(receivers, fracs)}
    schedule = tuple(
        ScheduleEntry((r.id,), (chosen[r.id],), fractions[r.id]) for r in receivers
    )
    return Plan(
        receivers=receivers,
        rates=rates,
        fractions=fractions,
        common_rate=fractions[receivers[0].id] * rates[receivers[0].id],
        schedule=schedule,
    )


def pair_plan(grouping: Grouping, table: ModCodTable) -> Plan:
    """Equal-rate plan for a grouping, mixing hierarchical and classical modcods.

    Each pair's channel time is split across its equal-rate mix; an odd
    singleton is served classically.
    """
    receivers = grouping.receivers()
    rates: dict[str, float] = {}
    pair_solutions: list[tuple[tuple[Receiver, Receiver], EqualRateSolution]] = []
    for a, b in grouping.pairs:
        solution = pair_equal_rate(a.snr_db, b.snr_db, table)
        if solution.degenerate or solution.rate <= 0.0:
            raise DegenerateReceiverError(
                f"pair ({a.id}, {b.id}) has no positive equal rate",
                receiver_ids=(a.id, b.id),
            )
        pair_solutions.append(((a, b), solution))
        rates[a.id] = 2.0 * solution.rate
        rates[b.id] = 2.0 * solution.rate
    single_mc: ModCod | None = None
    if grouping.singleton is not None:
        single_mc = best_single_modcod(grouping.singleton.snr_db, table)
        if single_mc is None:
            raise DegenerateReceiverError(
                f"receiver {grouping.singleton.id} decodes no modcod",
                receiver_ids=(grouping.singleton.id,),
            )
        rates[grouping.singleton.id] = single_mc.spectral_rate
    fracs = time_fractions([rates[r.id] for r in receivers])
    fractions = {r.id: f for r, f in zip(receivers, fracs)}

    schedule: list[ScheduleEntry] = []
    for (a, b), solution in pair_solutions:
        pair_time = fractions[a.id] + fractions[b.id]
        for vertex, weight in solution.mix:
            if weight < 1e-12:
                continue
            schedule.append(ScheduleEntry((a.id, b.id), vertex.modcods, pair_time * weight))
    if grouping.singleton is not None and single_mc is not None:
        schedule.append(
            ScheduleEntry(
                (grouping.singleton.id,), (single_mc,), fractions[grouping.singleton.id]
            )
        )
    return Plan(
        receivers=receivers,
        rates=rates,
        fractions=fractions,
        common_rate=fractions[receivers[0].id] * rates[receivers[0].id],
        schedule=tuple(schedule),
        grouping=grouping,
    )


def _matchings(items: tuple[Receiver, ...]) -> Iterable[tuple[tuple[Receiver, Receiver], ...]]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i in range(len(rest)):
        pair = (first, rest[i])
        for tail in _matchings(rest[:i] + rest[i + 1 :]):
            yield (pair,) + tail


def enumerate_groupings(
    receivers: Sequence[Receiver], mode: str = MODE_AUTO
) -> list[Grouping]:
    """All perfect matchings, deduplicated by per-pair SNR multisets.

    Odd receiver counts leave one classical singleton; every choice of
    singleton is part of the search space.  Exhaustive enumeration is
    limited to 12 receivers; beyond that only the max-spread heuristic
    pairing (sorted rank i with rank n/2 + i) is produced.
    """
    receivers = tuple(sorted(receivers, key=lambda r: (r.snr_db, r.id)))
    n = len(receivers)
    if n == 0:
        raise InvalidParameterError("need at least one receiver")
    if mode not in (MODE_AUTO, MODE_EXHAUSTIVE, MODE_HEURISTIC):
        raise InvalidParameterError(f"unknown grouping mode {mode!r}")
    if mode == MODE_HEURISTIC or (mode == MODE_AUTO and n > EXHAUSTIVE_LIMIT):
        return [_heuristic_grouping(receivers)]
    if n > EXHAUSTIVE_LIMIT:
        raise GroupSizeError(
            f"{n} receivers exceed the exhaustive enumeration limit ({EXHAUSTIVE_LIMIT}); "
            "use the heuristic mode"
        )
    singleton_choices: list[tuple[Receiver | None, tuple[Receiver, ...]]]
    if n % 2 == 0:
        singleton_choices = [(None, receivers)]
    else:
        singleton_choices = [
            (receivers[i], receivers[:i] + receivers[i + 1 :]) for i in range(n)
        ]
    seen: dict[tuple, Grouping] = {}
    for singleton, rest in singleton_choices:
        for pairs in _matchings(rest):
            grouping = Grouping(pairs=pairs, singleton=singleton)
            seen.setdefault(grouping.snr_key(), grouping)
    return sorted(seen.values(), key=lambda g: g.snr_key())


def _heuristic_grouping(receivers: tuple[Receiver, ...]) -> Grouping:
    # max-spread pairing: large SNR gaps inside a pair are where the
    # hierarchical gain lives
    n = len(receivers)
    singleton = None
    if n % 2 == 1:
        mid = n // 2
        singleton = receivers[mid]
        receivers = receivers[:mid] + receivers[mid + 1 :]
        n -= 1
    half = n // 2
    pairs = tuple((receivers[i], receivers[half + i]) for i in range(half))
    return Grouping(pairs=pairs, singleton=singleton)


def evaluate_groupings(
    receivers: Sequence[Receiver], table: ModCodTable, mode: str = MODE_AUTO
) -> list[tuple[Grouping, Plan]]:
    """All distinct groupings with their plans, best first.

    Ordered by common rate, then total pairwise SNR spread, then the
    lexicographic SNR key, so co-optimal groupings appear in a stable
    canonical order.
    """
    results = [
        (grouping, pair_plan(grouping, table))
        for grouping in enumerate_groupings(receivers, mode=mode)
    ]
    results.sort(key=lambda gp: (-gp[1].common_rate, -gp[0].total_snr_spread(), gp[0].snr_key()))
    return results


def best_grouping(
    receivers: Sequence[Receiver], table: ModCodTable, mode: str = MODE_AUTO
) -> tuple[Grouping, Plan]:
    """Grouping maximizing the common rate (deterministic tie-breaking)."""
    return evaluate_groupings(receivers, table, mode=mode)[0]
