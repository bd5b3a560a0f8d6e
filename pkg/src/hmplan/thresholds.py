"""Decoding-threshold derivation and the modcod table.

A modcod's decoding threshold is obtained with a capacity-offset method:
read the Es/N0 at which a reference QPSK with the same coding rate reaches
the target error rate, convert it to a normalized-capacity level, and find
the Es/N0 at which the target modulation/stream reaches the same level.
The reference operating points (QPSK turbo coding at BER 1e-5) are shipped
as a data file; they can also be recovered from a published grid of
hierarchical 16-QAM thresholds by self-consistency, which simultaneously
flags grid cells that do not fit any common reference (transcription
defects in the published numbers).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from statistics import median
from typing import Iterable, Mapping, Sequence

from .capacity import (
    DEFAULT_INTEGRATION,
    IntegrationSpec,
    StreamSelector,
    inverse_capacity,
    normalized_capacity,
)
from .constellation import (
    QPSK,
    UNIFORM_16QAM,
    Constellation,
    build_hierarchical_16qam,
    build_reference,
)
from .errors import ConfigurationError, InvalidParameterError, ReconstructionError

CODING_RATES: tuple[Fraction, ...] = (
    Fraction(1, 5),
    Fraction(2, 9),
    Fraction(1, 4),
    Fraction(2, 7),
    Fraction(1, 3),
    Fraction(2, 5),
    Fraction(1, 2),
    Fraction(2, 3),
)

DEFAULT_ALPHAS: tuple[float, ...] = (0.5, 0.8, 1.0, 2.0, 4.0)

# provenance of a reference operating point
SOURCE_PUBLISHED = "published"
SOURCE_DATAFILE = "datafile"
SOURCE_RECONSTRUCTED = "reconstructed"

# Published decoding thresholds in dB (Es/N0 at BER 1e-5, DVB-SH-style turbo
# coding) for the hierarchical 16-QAM, keyed by (coding rate, alpha, stream).
# A few cells are known to be defective (non-monotone); they are detected and
# excluded by reconstruct_references rather than silently patched here.
_HP = StreamSelector.HP
_LP = StreamSelector.LP
PUBLISHED_THRESHOLDS_DB: dict[tuple[Fraction, float, StreamSelector], float] = {}


def _fill_published() -> None:
    rows: dict[Fraction, tuple[float, ...]] = {
        # rate: a4 HP, a4 LP, a2 HP, a2 LP, a1 HP, a1 LP, a0.8 HP, a0.8 LP, a0.5 HP, a0.5 LP
        Fraction(1, 5): (-3.6, 10.3, -3.2, 6.2, -2.5, 3.7, -2.1, 3.2, -1.4, 2.6),
        Fraction(2, 9): (-3.1, 10.8, -2.6, 6.8, -1.9, 4.1, -1.6, 3.6, -0.8, 2.9),
        Fraction(1, 4): (-2.5, 11.4, -2.0, 7.3, -1.2, 4.6, -0.9, 4.1, 0.0, 3.4),
        Fraction(2, 7): (-1.8, 12.1, -1.3, 8.0, -0.4, 5.2, 0.0, 4.7, 0.9, 3.9),
        Fraction(1, 3): (-0.9, 12.9, -0.4, 8.8, 0.7, 6.0, 1.1, 5.4, 2.2, 4.6),
        Fraction(2, 5): (0.2, 14.0, 2.0, 6.8, 9.9, 6.9, 2.5, 6.3, 3.8, 5.4),
        Fraction(1, 2): (1.6, 15.3, 7.3, 11.3, 3.7, 8.1, 4.4, 7.5, 6.2, 6.5),
        Fraction(2, 3): (3.9, 17.5, 4.9, 13.4, 7.0, 10.2, 8.1, 9.5, 11.0, 8.4),
    }
    alphas = (4.0, 2.0, 1.0, 0.8, 0.5)
    for rate, cells in rows.items():
        for i, alpha in enumerate(alphas):
            PUBLISHED_THRESHOLDS_DB[(rate, alpha, _HP)] = cells[2 * i]
            PUBLISHED_THRESHOLDS_DB[(rate, alpha, _LP)] = cells[2 * i + 1]


_fill_published()


@dataclass(frozen=True)
class ReferencePoint:
    """QPSK operating point (Es/N0 at the target error rate) for one coding rate."""

    coding_rate: Fraction
    qpsk_es_n0_db: float
    source: str = SOURCE_DATAFILE


@dataclass(frozen=True)
class ThresholdAnomaly:
    """A published grid cell inconsistent with the row's common reference."""

    coding_rate: Fraction
    alpha: float
    stream: StreamSelector
    published_db: float
    implied_db: float

    @property
    def deviation_db(self) -> float:
        return self.published_db - self.implied_db

    def key(self) -> tuple[Fraction, float, StreamSelector]:
        return (self.coding_rate, self.alpha, self.stream)


@dataclass(frozen=True)
class ModCod:
    """One (modulation, stream, coding rate) menu entry."""

    modulation: str  # "QPSK", "16QAM" or "HIER16"
    alpha: float | None
    stream: StreamSelector
    coding_rate: Fraction
    spectral_rate: float  # useful bits per channel symbol
    threshold_db: float

    def label(self) -> str:
        mod = self.modulation if self.alpha is None else f"{self.modulation}(a={self.alpha:g})"
        stream = "" if self.stream is StreamSelector.FULL else f" {self.stream.value}"
        return f"{mod}{stream} {self.coding_rate}"


@dataclass(frozen=True)
class ModCodTable:
    """Immutable menu of modcods with a common pilot offset already applied."""

    entries: tuple[ModCod, ...]
    pilot_offset_db: float = 0.0

    def full_entries(self) -> tuple[ModCod, ...]:
        return tuple(e for e in self.entries if e.stream is StreamSelector.FULL)

    def alphas(self) -> tuple[float, ...]:
        return tuple(sorted({e.alpha for e in self.entries if e.alpha is not None}))

    def stream_entries(self, alpha: float, stream: StreamSelector) -> tuple[ModCod, ...]:
        found = tuple(
            e for e in self.entries if e.alpha == alpha and e.stream is stream
        )
        return tuple(sorted(found, key=lambda e: e.coding_rate))

    def validate_monotone(self) -> None:
        """Thresholds must increase strictly with coding rate per (modulation, stream)."""
        series: dict[tuple[str, float | None, StreamSelector], list[ModCod]] = {}
        for e in self.entries:
            series.setdefault((e.modulation, e.alpha, e.stream), []).append(e)
        for key, group in series.items():
            group.sort(key=lambda e: e.coding_rate)
            for lo, hi in zip(group, group[1:]):
                if not hi.threshold_db > lo.threshold_db:
                    raise ConfigurationError(
                        f"thresholds not increasing for {key}: "
                        f"{lo.coding_rate}->{lo.threshold_db}, {hi.coding_rate}->{hi.threshold_db}"
                    )

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["modulation", "alpha", "stream", "coding_rate", "spectral_rate", "threshold_db"]
            )
            for e in self.entries:
                writer.writerow(
                    [
                        e.modulation,
                        "" if e.alpha is None else repr(e.alpha),
                        e.stream.value,
                        str(e.coding_rate),
                        repr(e.spectral_rate),
                        repr(e.threshold_db),
                    ]
                )


def read_modcod_csv(path: str | Path) -> ModCodTable:
    entries = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            entries.append(
                ModCod(
                    modulation=row["modulation"],
                    alpha=float(row["alpha"]) if row["alpha"] else None,
                    stream=StreamSelector(row["stream"]),
                    coding_rate=Fraction(row["coding_rate"]),
                    spectral_rate=float(row["spectral_rate"]),
                    threshold_db=float(row["threshold_db"]),
                )
            )
    return ModCodTable(entries=tuple(entries))


def write_reference_csv(path: str | Path, references: Sequence[ReferencePoint]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["coding_rate", "qpsk_es_n0_db"])
        for ref in sorted(references, key=lambda r: r.coding_rate):
            writer.writerow([str(ref.coding_rate), repr(ref.qpsk_es_n0_db)])


def read_reference_csv(path: str | Path) -> list[ReferencePoint]:
    refs = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            refs.append(
                ReferencePoint(
                    coding_rate=Fraction(row["coding_rate"]),
                    qpsk_es_n0_db=float(row["qpsk_es_n0_db"]),
                    source=SOURCE_DATAFILE,
                )
            )
    _check_reference_order(refs)
    return refs


def shipped_references() -> list[ReferencePoint]:
    """Reference operating points bundled with the package."""
    with resources.as_file(resources.files("hmplan").joinpath("data/reference_qpsk.csv")) as p:
        return read_reference_csv(p)


def _check_reference_order(refs: Sequence[ReferencePoint]) -> None:
    ordered = sorted(refs, key=lambda r: r.coding_rate)
    for lo, hi in zip(ordered, ordered[1:]):
        if not hi.qpsk_es_n0_db > lo.qpsk_es_n0_db:
            raise ConfigurationError(
                f"reference Es/N0 must increase with coding rate "
                f"({lo.coding_rate}->{lo.qpsk_es_n0_db}, {hi.coding_rate}->{hi.qpsk_es_n0_db})"
            )


# The threshold pipeline models the LP stream with a quadrant-blind decoder;
# the successive-decoding LP capacity sits ~0.6-1.4 dB lower at small alpha
# and does not reproduce published thresholds.
_THRESHOLD_SELECTOR = {
    StreamSelector.FULL: StreamSelector.FULL,
    StreamSelector.HP: StreamSelector.HP,
    StreamSelector.LP: StreamSelector.LP_BLIND,
}


def derive_threshold(
    c: Constellation,
    stream: StreamSelector,
    coding_rate: Fraction,
    ref: ReferencePoint,
    spec: IntegrationSpec = DEFAULT_INTEGRATION,
    qpsk: Constellation | None = None,
) -> float:
    """Decoding threshold of one modulation/stream at one coding rate.

    Converts the reference QPSK operating point into a normalized-capacity
    level and inverts the target stream's capacity at that level.
    """
    if ref.coding_rate != coding_rate:
        raise InvalidParameterError(
            f"reference rate {ref.coding_rate} does not match requested rate {coding_rate}"
        )
    qpsk = qpsk or build_reference(QPSK)
    level = normalized_capacity(qpsk, StreamSelector.FULL, ref.qpsk_es_n0_db, spec)
    return inverse_capacity(c, _THRESHOLD_SELECTOR[stream], level, spec)


def reconstruct_references(
    published: Mapping[tuple[Fraction, float, StreamSelector], float],
    spec: IntegrationSpec = DEFAULT_INTEGRATION,
    consistency_tol_db: float = 0.5,
) -> tuple[list[ReferencePoint], list[ThresholdAnomaly]]:
    """Recover per-rate QPSK operating points from a published threshold grid.

    For every coding rate the grid supplies HP and LP thresholds for each
    constellation ratio.  Each cell implies a normalized-capacity level; the
    row's level is the median over its ten cells and maps back to a QPSK
    Es/N0.  Cells whose published threshold deviates more than
    ``consistency_tol_db`` from the threshold implied by the row level are
    reported as anomalies (and should be excluded from regressions).

    Raises:
        ReconstructionError: if a rate keeps fewer than 3 consistent cells.
    """
    rates = sorted({key[0] for key in published})
    alphas = sorted({key[1] for key in published})
    consts = {alpha: build_hierarchical_16qam(alpha) for alpha in alphas}
    qpsk = build_reference(QPSK)

    for rate in rates:
        for alpha in alphas:
            for stream in (StreamSelector.HP, StreamSelector.LP):
                if (rate, alpha, stream) not in published:
                    raise InvalidParameterError(
                        f"published grid misses cell ({rate}, {alpha}, {stream.value})"
                    )

    references: list[ReferencePoint] = []
    anomalies: list[ThresholdAnomaly] = []
    for rate in rates:
        cells = [
            (alpha, stream, published[(rate, alpha, stream)])
            for alpha in alphas
            for stream in (StreamSelector.HP, StreamSelector.LP)
        ]
        levels = [
            normalized_capacity(consts[alpha], _THRESHOLD_SELECTOR[stream], thr, spec)
            for alpha, stream, thr in cells
        ]
        row_level = median(levels)
        ref_db = inverse_capacity(qpsk, StreamSelector.FULL, row_level, spec)
        consistent = 0
        for alpha, stream, thr in cells:
            implied = inverse_capacity(consts[alpha], _THRESHOLD_SELECTOR[stream], row_level, spec)
            if abs(thr - implied) > consistency_tol_db:
                anomalies.append(ThresholdAnomaly(rate, alpha, stream, thr, implied))
            else:
                consistent += 1
        if consistent < 3:
            raise ReconstructionError(
                f"rate {rate}: only {consistent} grid cells are mutually consistent"
            )
        references.append(ReferencePoint(rate, ref_db, SOURCE_RECONSTRUCTED))
    _check_reference_order(references)
    return references, anomalies


def build_modcod_table(
    alphas: Iterable[float],
    references: Sequence[ReferencePoint],
    pilot_offset_db: float = 0.0,
    spec: IntegrationSpec = DEFAULT_INTEGRATION,
) -> ModCodTable:
    """Derive the full modcod menu from reference operating points.

    Entries cover QPSK and uniform 16-QAM (full-symbol streams) plus the
    HP/LP pair of the hierarchical 16-QAM for every requested alpha, with
    ``pilot_offset_db`` added to every derived threshold.  Spectral rates
    are 2r for the two-bit streams and 4r for the 16-QAM.
    """
    by_rate = {ref.coding_rate: ref for ref in references}
    missing = [str(rate) for rate in CODING_RATES if rate not in by_rate]
    if missing:
        raise ConfigurationError(f"references missing for coding rates: {', '.join(missing)}")

    qpsk = build_reference(QPSK)
    qam16 = build_reference(UNIFORM_16QAM)
    hier = {alpha: build_hierarchical_16qam(alpha) for alpha in alphas}

    entries: list[ModCod] = []
    for rate in CODING_RATES:
        ref = by_rate[rate]
        level = normalized_capacity(qpsk, StreamSelector.FULL, ref.qpsk_es_n0_db, spec)
        # the QPSK threshold is the reference point itself by construction
        entries.append(
            ModCod("QPSK", None, StreamSelector.FULL, rate, 2.0 * rate, ref.qpsk_es_n0_db + pilot_offset_db)
        )
        entries.append(
            ModCod(
                "16QAM",
                None,
                StreamSelector.FULL,
                rate,
                4.0 * rate,
                inverse_capacity(qam16, StreamSelector.FULL, level, spec) + pilot_offset_db,
            )
        )
        for alpha, const in hier.items():
            for stream in (StreamSelector.HP, StreamSelector.LP):
                thr = inverse_capacity(const, _THRESHOLD_SELECTOR[stream], level, spec)
                entries.append(
                    ModCod("HIER16", alpha, stream, rate, 2.0 * rate, thr + pilot_offset_db)
                )
    table = ModCodTable(entries=tuple(entries), pilot_offset_db=pilot_offset_db)
    table.validate_monotone()
    return table
