"""Experiment configuration: scenario files and the spot-beam channel model.

A scenario is a versioned JSON document describing the channel (either an
explicit receiver list or a beam model), the constellation ratios to
include, reference-table and integration settings, and the output
directory.  Command-line flags mirror every field and win over the file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .capacity import GAUSS_HERMITE, IntegrationSpec
from .errors import ConfigurationError
from .allocation import Receiver
from .thresholds import DEFAULT_ALPHAS

SCENARIO_VERSION = 1

_TOP_KEYS = {
    "version",
    "receivers",
    "beam",
    "alphas",
    "reference_csv",
    "pilot_offset_db",
    "integration",
    "output_dir",
    "region",
    "sweep",
    "plots",
}


def beam_snrs(snr_max_db: float, delta_db: float) -> list[float]:
    """Six-receiver spot-beam SNR profile.

    One receiver sits one attenuation step below the beam center, two sit
    two steps below and three sit three steps below.
    """
    m, d = float(snr_max_db), float(delta_db)
    return [m - d, m - 2 * d, m - 2 * d, m - 3 * d, m - 3 * d, m - 3 * d]


def beam_receivers(snr_max_db: float, delta_db: float) -> tuple[Receiver, ...]:
    return tuple(
        Receiver(id=f"rec{i + 1}", snr_db=snr)
        for i, snr in enumerate(beam_snrs(snr_max_db, delta_db))
    )


@dataclass(frozen=True)
class Scenario:
    """Validated experiment configuration."""

    receivers: tuple[Receiver, ...] | None = None
    beam: tuple[float, float] | None = None  # (snr_max_db, delta_db)
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    reference_csv: Path | None = None
    pilot_offset_db: float = 0.0
    integration: IntegrationSpec = field(default_factory=IntegrationSpec)
    output_dir: Path = Path("hmplan-out")
    region: tuple[float, float] | None = None  # (snr1_db, snr2_db)
    sweep: tuple[float, float, float] | None = None  # (min_db, max_db, step_db)
    plots: bool = True

    def __post_init__(self) -> None:
        if self.receivers is not None and self.beam is not None:
            raise ConfigurationError("scenario must give either receivers or a beam, not both")

    def channel_receivers(self) -> tuple[Receiver, ...]:
        """The receiver population; exactly one channel description must be present."""
        if self.receivers is not None:
            return self.receivers
        if self.beam is not None:
            return beam_receivers(*self.beam)
        raise ConfigurationError("scenario needs a receiver list or a beam model")


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate a scenario JSON file."""
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigurationError("scenario file must contain a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigurationError(f"unknown scenario keys: {', '.join(sorted(unknown))}")
    if raw.get("version") != SCENARIO_VERSION:
        raise ConfigurationError(
            f"unsupported scenario version {raw.get('version')!r}, expected {SCENARIO_VERSION}"
        )
    receivers = None
    if "receivers" in raw:
        receivers = tuple(
            Receiver(id=str(r["id"]), snr_db=float(r["snr_db"])) for r in raw["receivers"]
        )
    beam = None
    if "beam" in raw:
        beam = (float(raw["beam"]["snr_max_db"]), float(raw["beam"]["delta_db"]))
    integration = IntegrationSpec(**raw.get("integration", {})) if "integration" in raw else IntegrationSpec()
    region = None
    if "region" in raw:
        region = (float(raw["region"]["snr1_db"]), float(raw["region"]["snr2_db"]))
    sweep = None
    if "sweep" in raw:
        sweep = (
            float(raw["sweep"]["min_db"]),
            float(raw["sweep"]["max_db"]),
            float(raw["sweep"]["step_db"]),
        )
    return Scenario(
        receivers=receivers,
        beam=beam,
        alphas=tuple(float(a) for a in raw.get("alphas", DEFAULT_ALPHAS)),
        reference_csv=Path(raw["reference_csv"]) if raw.get("reference_csv") else None,
        pilot_offset_db=float(raw.get("pilot_offset_db", 0.0)),
        integration=integration,
        output_dir=Path(raw.get("output_dir", "hmplan-out")),
        region=region,
        sweep=sweep,
        plots=bool(raw.get("plots", True)),
    )


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    doc: dict = {"version": SCENARIO_VERSION}
    if scenario.receivers is not None:
        doc["receivers"] = [{"id": r.id, "snr_db": r.snr_db} for r in scenario.receivers]
    if scenario.beam is not None:
        doc["beam"] = {"snr_max_db": scenario.beam[0], "delta_db": scenario.beam[1]}
    doc["alphas"] = list(scenario.alphas)
    if scenario.reference_csv is not None:
        doc["reference_csv"] = str(scenario.reference_csv)
    doc["pilot_offset_db"] = scenario.pilot_offset_db
    doc["integration"] = {
        "method": scenario.integration.method,
        "nodes_per_axis": scenario.integration.nodes_per_axis,
        "sample_count": scenario.integration.sample_count,
        "rng_seed": scenario.integration.rng_seed,
    }
    doc["output_dir"] = str(scenario.output_dir)
    if scenario.region is not None:
        doc["region"] = {"snr1_db": scenario.region[0], "snr2_db": scenario.region[1]}
    if scenario.sweep is not None:
        doc["sweep"] = {
            "min_db": scenario.sweep[0],
            "max_db": scenario.sweep[1],
            "step_db": scenario.sweep[2],
        }
    doc["plots"] = scenario.plots
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def override(scenario: Scenario, **kwargs) -> Scenario:
    """Apply non-None keyword overrides (flags win over the file)."""
    updates = {k: v for k, v in kwargs.items() if v is not None}
    return replace(scenario, **updates) if updates else scenario
