"""Two-receiver achievable rate regions and the equal-rate operating point.

For a pair of receivers, classical modcods reach rate pairs on the axes
((R1, 0) and (0, R2)) while the hierarchical 16-QAM reaches interior pairs:
the high-priority stream goes to the receiver with the smaller SNR and the
low-priority stream to the other one.  Time sharing makes every convex
combination achievable, so the region is the convex hull of the generated
points (and the origin).  The equal-rate operating point is the farthest
point of the hull on the diagonal R1 = R2.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .capacity import StreamSelector
from .errors import InvalidParameterError
from .thresholds import ModCod, ModCodTable

COLLINEAR_TOL = 1e-12

KIND_CLASSICAL = "classical"
KIND_HIERARCHICAL = "hierarchical"
KIND_ORIGIN = "origin"


@dataclass(frozen=True)
class RatePoint:
    """An achievable (R1, R2) pair and the modcod(s) generating it."""

    r1: float
    r2: float
    modcods: tuple[ModCod, ...]
    kind: str

    def coords(self) -> tuple[float, float]:
        return (self.r1, self.r2)

    def provenance(self) -> str:
        if not self.modcods:
            return "none"
        return " + ".join(mc.label() for mc in self.modcods)


@dataclass(frozen=True)
class RateRegion:
    """All generated rate points plus the upper-right hull, ordered by r1."""

    points: tuple[RatePoint, ...]
    hull: tuple[RatePoint, ...]

    def csv_rows(self) -> list[tuple[float, float, str, bool]]:
        hull_ids = {id(p) for p in self.hull}
        return [(p.r1, p.r2, p.provenance(), id(p) in hull_ids) for p in self.points]

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["r1", "r2", "provenance", "is_hull_vertex"])
            for r1, r2, prov, is_vertex in self.csv_rows():
                writer.writerow([repr(r1), repr(r2), prov, int(is_vertex)])


@dataclass(frozen=True)
class EqualRateSolution:
    """The maximal common rate and the <=2-vertex time-sharing mix achieving it."""

    rate: float
    mix: tuple[tuple[RatePoint, float], ...]
    degenerate: bool = False


def best_single_modcod(snr_db: float, table: ModCodTable) -> ModCod | None:
    """Highest-rate full-symbol modcod decodable at the given SNR.

    Ties on spectral rate go to the entry with the lower threshold; None if
    nothing is decodable.
    """
    candidates = [e for e in table.full_entries() if e.threshold_db <= snr_db]
    if not candidates:
        return None
    return max(candidates, key=lambda e: (e.spectral_rate, -e.threshold_db, e.modulation))


def _best_stream_modcod(
    snr_db: float, table: ModCodTable, alpha: float, stream: StreamSelector
) -> ModCod | None:
    candidates = [e for e in table.stream_entries(alpha, stream) if e.threshold_db <= snr_db]
    if not candidates:
        return None
    return max(candidates, key=lambda e: e.spectral_rate)


def achievable_points(snr_lo_db: float, snr_hi_db: float, table: ModCodTable) -> list[RatePoint]:
    """Enumerate the rate pairs reachable by single modcods for a receiver pair.

    Receiver 1 is the one with the smaller SNR; it gets the high-priority
    stream of every hierarchical entry while receiver 2 gets the
    low-priority one.  Hierarchical entries with only one decodable stream
    contribute a degenerate on-axis point.  Only the per-alpha maximal
    coding-rate pair is kept; dominated combinations cannot change the hull.
    """
    if snr_lo_db > snr_hi_db:
        raise InvalidParameterError("snr_lo_db must not exceed snr_hi_db")
    points: list[RatePoint] = []
    mc_lo = best_single_modcod(snr_lo_db, table)
    if mc_lo is not None:
        points.append(RatePoint(mc_lo.spectral_rate, 0.0, (mc_lo,), KIND_CLASSICAL))
    mc_hi = best_single_modcod(snr_hi_db, table)
    if mc_hi is not None:
        points.append(RatePoint(0.0, mc_hi.spectral_rate, (mc_hi,), KIND_CLASSICAL))
    for alpha in table.alphas():
        hp = _best_stream_modcod(snr_lo_db, table, alpha, StreamSelector.HP)
        lp = _best_stream_modcod(snr_hi_db, table, alpha, StreamSelector.LP)
        if hp is not None and lp is not None:
            points.append(
                RatePoint(hp.spectral_rate, lp.spectral_rate, (hp, lp), KIND_HIERARCHICAL)
            )
        elif hp is not None:
            points.append(RatePoint(hp.spectral_rate, 0.0, (hp,), KIND_HIERARCHICAL))
        elif lp is not None:
            points.append(RatePoint(0.0, lp.spectral_rate, (lp,), KIND_HIERARCHICAL))
    if not points:
        points.append(RatePoint(0.0, 0.0, (), KIND_ORIGIN))
    return points


def upper_hull(points: list[RatePoint]) -> RateRegion:
    """Pareto (upper-right) convex hull of the points, origin-augmented.

    Dominated and collinear points are kept out of the vertex list
    (endpoints win); every input point lies on or below the hull.
    """
    if not points:
        raise InvalidParameterError("need at least one rate point")
    by_coords: dict[tuple[float, float], RatePoint] = {}
    for p in points:
        by_coords.setdefault(p.coords(), p)
    unique = list(by_coords.values())
    pareto = [
        p
        for p in unique
        if not any(
            q.r1 >= p.r1 and q.r2 >= p.r2 and q.coords() != p.coords() for q in unique
        )
    ]
    pareto.sort(key=lambda p: (p.r1, -p.r2))
    chain: list[RatePoint] = []
    for p in pareto:
        while len(chain) >= 2:
            a, b = chain[-2], chain[-1]
            cross = (b.r1 - a.r1) * (p.r2 - a.r2) - (b.r2 - a.r2) * (p.r1 - a.r1)
            if cross >= -COLLINEAR_TOL:
                chain.pop()
            else:
                break
        chain.append(p)
    return RateRegion(points=tuple(points), hull=tuple(chain))


def equal_rate_point(region: RateRegion) -> EqualRateSolution:
    """Maximal R with (R, R) in the region, plus the mix achieving it.

    Returns a zero-rate solution flagged degenerate when one receiver's
    rate is zero everywhere (the hull never crosses the diagonal).
    """
    hull = region.hull
    diag = [v.r2 - v.r1 for v in hull]
    for v, d in zip(hull, diag):
        if abs(d) <= COLLINEAR_TOL and v.r1 > 0.0:
            return EqualRateSolution(rate=v.r1, mix=((v, 1.0),))
    for i in range(len(hull) - 1):
        if diag[i] > 0.0 > diag[i + 1]:
            s = diag[i] / (diag[i] - diag[i + 1])
            rate = (1.0 - s) * hull[i].r1 + s * hull[i + 1].r1
            if s <= COLLINEAR_TOL:
                return EqualRateSolution(rate=rate, mix=((hull[i], 1.0),))
            if s >= 1.0 - COLLINEAR_TOL:
                return EqualRateSolution(rate=rate, mix=((hull[i + 1], 1.0),))
            return EqualRateSolution(rate=rate, mix=((hull[i], 1.0 - s), (hull[i + 1], s)))
    return EqualRateSolution(rate=0.0, mix=(), degenerate=True)
