"""Signal-set construction for QPSK, uniform 16-QAM and hierarchical 16-QAM.

The hierarchical 16-QAM is the superposition of two QPSK components: an
outer one selecting the quadrant (carrying the high-priority bit pair) and
an inner one selecting the position inside the quadrant (the low-priority
bit pair).  The geometry is controlled by the constellation ratio
``alpha = d_h / d_l``, where ``2*d_h`` is the minimum distance between two
points carrying different high-priority bits and ``2*d_l`` is the minimum
distance between any two points.  ``alpha = 1`` reproduces the uniform
16-QAM grid.  Every constellation is normalized to unit mean symbol energy.

Bit labels are MSB-first strings.  For 16-point sets the first two bits are
the high-priority (quadrant) pair and the last two the low-priority
(in-quadrant) pair; within each pair, bit 0 selects the I-axis sign/level
and bit 1 the Q-axis one, which is Gray both across quadrants and inside
them.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError

ENERGY_TOL = 1e-12

QPSK = "QPSK"
UNIFORM_16QAM = "UNIFORM_16QAM"
HIER_16QAM = "HIER16"


@dataclass(frozen=True)
class Constellation:
    """An energy-normalized labeled signal set.

    Attributes:
        kind: modulation family identifier ("QPSK", "16QAM" or "HIER16").
        points: complex amplitudes, unit mean symbol energy.
        labels: one MSB-first bit string per point.
        bits_per_symbol: number of bits carried by one symbol.
        alpha: constellation ratio d_h/d_l, or None for reference modulations.
    """

    kind: str
    points: tuple[complex, ...]
    labels: tuple[str, ...]
    bits_per_symbol: int
    alpha: float | None = None

    def point_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)

    def mean_energy(self) -> float:
        return float(np.mean(np.abs(self.point_array()) ** 2))

    def _groups_by_bits(self, start: int, stop: int) -> tuple[np.ndarray, ...]:
        groups: dict[str, list[int]] = {}
        for i, label in enumerate(self.labels):
            groups.setdefault(label[start:stop], []).append(i)
        return tuple(np.asarray(groups[k], dtype=int) for k in sorted(groups))

    def hp_groups(self) -> tuple[np.ndarray, ...]:
        """Point indices grouped by the high-priority (quadrant) bit pair."""
        self.require_hierarchical_layout()
        return self._groups_by_bits(0, 2)

    def lp_groups(self) -> tuple[np.ndarray, ...]:
        """Point indices grouped by the low-priority (in-quadrant) bit pair."""
        self.require_hierarchical_layout()
        return self._groups_by_bits(2, 4)

    def require_hierarchical_layout(self) -> None:
        if self.bits_per_symbol != 4 or len(self.points) != 16:
            raise InvalidParameterError(
                f"{self.kind}: stream selection needs a 16-point two-layer constellation"
            )

    def min_distance(self) -> float:
        """Minimum distance between any two distinct points (2*d_l)."""
        arr = self.point_array()
        d = np.abs(arr[:, None] - arr[None, :])
        return float(np.min(d[d > 0]))

    def min_hp_distance(self) -> float:
        """Minimum distance between points with different high-priority bits (2*d_h)."""
        self.require_hierarchical_layout()
        arr = self.point_array()
        hp = np.asarray([label[:2] for label in self.labels])
        d = np.abs(arr[:, None] - arr[None, :])
        mask = hp[:, None] != hp[None, :]
        return float(np.min(d[mask]))

    def min_in_quadrant_distance(self) -> float:
        """Minimum distance between points sharing their high-priority bits (2*d_l).

        For alpha >= 1 this equals the overall minimum distance; below 1 the
        cross-quadrant spacing becomes the smallest one, so d_l has to be
        measured inside a quadrant.
        """
        self.require_hierarchical_layout()
        arr = self.point_array()
        hp = np.asarray([label[:2] for label in self.labels])
        d = np.abs(arr[:, None] - arr[None, :])
        mask = (hp[:, None] == hp[None, :]) & (d > 0)
        return float(np.min(d[mask]))

    def measured_alpha(self) -> float:
        """Ratio d_h/d_l recovered from the built geometry."""
        return self.min_hp_distance() / self.min_in_quadrant_distance()

    def validate(self) -> None:
        """Check the structural invariants; raise InvalidParameterError otherwise."""
        m = self.bits_per_symbol
        if len(self.points) != 2**m:
            raise InvalidParameterError(f"expected {2 ** m} points, got {len(self.points)}")
        if sorted(self.labels) != ["".join(b) for b in itertools.product("01", repeat=m)]:
            raise InvalidParameterError("labels must be distinct and cover all bit strings")
        if abs(self.mean_energy() - 1.0) > ENERGY_TOL:
            raise InvalidParameterError(f"mean symbol energy {self.mean_energy()!r} != 1")
        if m == 4:
            for idx in self._groups_by_bits(0, 2):
                pts = self.point_array()[idx]
                if len(set(np.sign(pts.real))) != 1 or len(set(np.sign(pts.imag))) != 1:
                    raise InvalidParameterError("a high-priority bit pair spans several quadrants")

    def csv_rows(self) -> list[tuple[str, float, float]]:
        return [(lab, p.real, p.imag) for lab, p in zip(self.labels, self.points)]

    def write_csv(self, path: str | Path) -> None:
        """Dump the labeled points as ``label,re,im`` rows (for plotting/debug)."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label", "re", "im"])
            for row in self.csv_rows():
                writer.writerow([row[0], repr(row[1]), repr(row[2])])


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0.0:
        raise InvalidParameterError(f"constellation ratio must be positive, got {alpha!r}")
    return alpha


def build_hierarchical_16qam(alpha: float) -> Constellation:
    """Build the hierarchical 16-QAM for a given constellation ratio.

    The quadrant QPSK component has parameter ``2*(d_h + d_l)`` and the
    in-quadrant component ``2*d_l``; per-axis levels are ``+/-d_h`` (inner)
    and ``+/-(d_h + 2*d_l)`` (outer).  The set is scaled to unit mean energy.

    Args:
        alpha: ratio d_h/d_l, strictly positive (alpha <= 1 is allowed).

    Returns:
        The labeled, normalized 16-point constellation.
    """
    alpha = _check_alpha(alpha)
    d_l = 1.0
    inner = alpha * d_l
    outer = alpha * d_l + 2.0 * d_l
    # per-axis Gray map: (sign bit, level bit) -> coordinate
    level = {(0, 0): inner, (0, 1): outer, (1, 0): -inner, (1, 1): -outer}
    points = []
    labels = []
    for b0, b1, b2, b3 in itertools.product((0, 1), repeat=4):
        points.append(complex(level[(b0, b2)], level[(b1, b3)]))
        labels.append(f"{b0}{b1}{b2}{b3}")
    scale = 1.0 / math.sqrt(float(np.mean(np.abs(points) ** 2)))
    const = Constellation(
        kind=HIER_16QAM,
        points=tuple(p * scale for p in points),
        labels=tuple(labels),
        bits_per_symbol=4,
        alpha=alpha,
    )
    const.validate()
    return const


def build_reference(mod_id: str) -> Constellation:
    """Build a unit-energy Gray-labeled reference modulation.

    Args:
        mod_id: "QPSK" or "UNIFORM_16QAM".
    """
    if mod_id == QPSK:
        amp = 1.0 / math.sqrt(2.0)
        points = []
        labels = []
        for b0, b1 in itertools.product((0, 1), repeat=2):
            points.append(complex(amp if b0 == 0 else -amp, amp if b1 == 0 else -amp))
            labels.append(f"{b0}{b1}")
        const = Constellation(QPSK, tuple(points), tuple(labels), 2, None)
        const.validate()
        return const
    if mod_id == UNIFORM_16QAM:
        base = build_hierarchical_16qam(1.0)
        const = Constellation("16QAM", base.points, base.labels, 4, None)
        const.validate()
        return const
    raise InvalidParameterError(f"unknown reference modulation {mod_id!r}")


def energy_split(alpha: float) -> tuple[float, float]:
    """Energy fractions (high-priority, low-priority) of the two QPSK components.

    The component energies satisfy ``E_hp / E_lp = (1 + alpha)**2`` and sum
    to the total symbol energy.
    """
    alpha = _check_alpha(alpha)
    ratio = (1.0 + alpha) ** 2
    hp = ratio / (ratio + 1.0)
    return hp, 1.0 - hp
