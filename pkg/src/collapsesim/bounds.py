"""Exclusion curves in the (lam, r_c) plane from experiment descriptors.

Everything here is SI. Upper bounds come from interferometric contrast loss
and from collapse-induced heating; the lower bound comes from requiring a
graphene disk superposition to collapse quickly enough.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .csl import RigidBodyGeometry, amplification_factor
from .extensions import DissipativeParams, derive_dissipative, dissipative_initial_slope
from .noise import colored_power_fraction
from .params import HBAR, K_B, M0, CollapseParams, canonical_points

SCHEMA_VERSION = 1

GRAPHENE_AREAL_DENSITY = 7.6e-7  # kg/m^2, single layer
GRAPHENE_INTERLAYER = 3.35e-10  # m, used as the sheet thickness
GRAPHENE_RADIUS = 1e-5  # m
GRAPHENE_COLLAPSE_TIME = 1e-2  # s

RC_MIN, RC_MAX, RC_POINTS = 1e-9, 1e-3, 60

_RECORD_FIELDS = {"name", "kind", "n_nucleons", "mass", "geometry", "separation", "duration",
                  "observable_limit"}
_GEOMETRY_FIELDS = {"size", "spacing"}


class SchemaError(ValueError):
    """Invalid experiment descriptor; the message starts with the offending location."""


def default_rc_grid(rc_min: float = RC_MIN, rc_max: float = RC_MAX, n: int = RC_POINTS) -> np.ndarray:
    if not 0 < rc_min < rc_max or n < 2:
        raise ValueError("need 0 < rc_min < rc_max and at least two points")
    return np.logspace(np.log10(rc_min), np.log10(rc_max), n)


@dataclass(frozen=True)
class ExperimentRecord:
    """One experiment reduced to the numbers a bound needs.

    ``observable_limit`` is the retained interference contrast for
    ``kind="interferometric"`` and the largest heating power (W) that may be
    attributed to collapse for ``kind="heating"``.
    """

    name: str
    kind: str
    duration: float
    observable_limit: float
    n_nucleons: int | None = None
    mass: float | None = None
    geometry: RigidBodyGeometry | None = None
    separation: float | None = None

    def __post_init__(self):
        where = f"experiment {self.name!r}"
        if self.kind not in ("interferometric", "heating"):
            raise SchemaError(f"{where}: kind must be 'interferometric' or 'heating'")
        if self.n_nucleons is None and self.mass is None:
            raise SchemaError(f"{where}: one of 'n_nucleons' or 'mass' is required")
        if self.n_nucleons is not None and self.n_nucleons < 1:
            raise SchemaError(f"{where}: n_nucleons must be >= 1")
        if self.mass is not None and not self.mass > 0:
            raise SchemaError(f"{where}: mass must be positive")
        if not self.duration > 0:
            raise SchemaError(f"{where}: duration must be positive")
        if self.kind == "interferometric":
            if self.separation is None:
                raise SchemaError(f"{where}: field 'separation' is required for interferometric records")
            if self.geometry is None:
                raise SchemaError(f"{where}: field 'geometry' is required for interferometric records")
            if self.separation < 0:
                raise SchemaError(f"{where}: separation must be non-negative")
            if not 0 < self.observable_limit <= 1:
                raise SchemaError(f"{where}: contrast limit must lie in (0, 1]")
        elif not self.observable_limit > 0:
            raise SchemaError(f"{where}: power limit must be positive")

    @property
    def nucleons(self) -> int:
        if self.n_nucleons is not None:
            return self.n_nucleons
        return max(1, int(round(self.mass / M0)))

    @property
    def total_mass(self) -> float:
        return self.mass if self.mass is not None else self.n_nucleons * M0

    def to_dict(self) -> dict:
        out = {"name": self.name, "kind": self.kind}
        if self.n_nucleons is not None:
            out["n_nucleons"] = self.n_nucleons
        if self.mass is not None:
            out["mass"] = self.mass
        if self.geometry is not None:
            out["geometry"] = {"size": self.geometry.size, "spacing": self.geometry.spacing}
        if self.separation is not None:
            out["separation"] = self.separation
        out["duration"] = self.duration
        out["observable_limit"] = self.observable_limit
        return out


@dataclass(frozen=True, eq=False)
class BoundCurve:
    r_c: np.ndarray
    lam: np.ndarray
    sense: str
    source: str

    def __post_init__(self):
        r_c = np.asarray(self.r_c, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        if r_c.shape != lam.shape or r_c.ndim != 1:
            raise ValueError("r_c and lam must be 1D arrays of equal length")
        if np.any(r_c <= 0) or np.any(np.diff(r_c) <= 0):
            raise ValueError("r_c samples must be positive and strictly increasing")
        if np.any(np.isnan(lam)) or np.any(lam < 0):
            raise ValueError("lambda values must be non-negative")
        if self.sense not in ("upper", "lower"):
            raise ValueError("sense must be 'upper' or 'lower'")
        object.__setattr__(self, "r_c", r_c)
        object.__setattr__(self, "lam", lam)

    def at(self, r_c: float) -> float:
        """Log-log interpolation of the curve; ``nan`` outside the sampled range."""
        if r_c < self.r_c[0] or r_c > self.r_c[-1]:
            return float("nan")
        i = int(np.clip(np.searchsorted(self.r_c, r_c), 1, len(self.r_c) - 1))
        lo, hi = self.lam[i - 1], self.lam[i]
        if lo == 0 or hi == 0 or np.isinf(lo) or np.isinf(hi):
            return float(lo if r_c - self.r_c[i - 1] < self.r_c[i] - r_c else hi)
        w = np.log(r_c / self.r_c[i - 1]) / np.log(self.r_c[i] / self.r_c[i - 1])
        return float(np.exp((1 - w) * np.log(lo) + w * np.log(hi)))

    def classify(self, point: CollapseParams) -> str:
        bound = self.at(point.r_c)
        if np.isnan(bound):
            return "allowed"
        if self.sense == "upper":
            return "excluded" if point.lam > bound else "allowed"
        return "excluded" if point.lam < bound else "allowed"


@dataclass(frozen=True)
class ModelVariant:
    """``white``, ``dissipative`` (noise temperature ``t_csl`` in K) or
    ``colored`` (cutoff ``omega_c`` in rad/s)."""

    kind: str = "white"
    t_csl: float = 1.0
    omega_c: float = float("inf")

    def __post_init__(self):
        if self.kind not in ("white", "dissipative", "colored"):
            raise ValueError(f"unknown model variant {self.kind!r}")
        if not self.t_csl > 0 or not self.omega_c > 0:
            raise ValueError("t_csl and omega_c must be positive")

    def label(self) -> str:
        if self.kind == "dissipative":
            return f"dissipative(T_CSL={self.t_csl:g} K)"
        if self.kind == "colored":
            return f"colored(omega_c={self.omega_c:g} rad/s)"
        return "white"


@dataclass
class ExclusionReport:
    curves: list
    verdicts: dict
    variant: ModelVariant = field(default_factory=ModelVariant)

    def to_csv(self) -> str:
        return curves_to_csv(self.curves)

    def to_json(self) -> str:
        doc = {
            "variant": self.variant.label(),
            "curves": [
                {"source": c.source, "sense": c.sense,
                 "r_c_m": [float(f"{v:.8e}") for v in c.r_c],
                 "lambda_per_s": [_json_number(v) for v in c.lam]}
                for c in self.curves
            ],
            "verdicts": self.verdicts,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def _json_number(v):
    return "inf" if np.isinf(v) else float(f"{v:.8e}")


def interferometric_bound(rec: ExperimentRecord, r_c_grid, noise_fraction: float = 1.0) -> BoundCurve:
    """Largest ``lam`` compatible with the retained contrast, at each ``r_c``.

    Solves ``contrast = exp(-Lambda(lam, r_c) (1 - exp(-d**2 / 4 r_c**2)) T * eta)``
    with ``eta`` the colored-noise power fraction (1 for white noise).
    """
    if rec.kind != "interferometric":
        raise ValueError("interferometric_bound needs an interferometric record")
    r_c = np.asarray(r_c_grid, dtype=float)
    geom = RigidBodyGeometry(rec.nucleons, rec.geometry.size, rec.geometry.spacing)
    gauss = -np.expm1(-(rec.separation**2) / (4.0 * r_c**2))
    denom = amplification_factor(geom, r_c) * gauss * rec.duration * noise_fraction
    with np.errstate(divide="ignore"):
        lam = -np.log(rec.observable_limit) / denom
    lam = np.where(denom == 0, np.inf, lam)
    return BoundCurve(r_c, lam, "upper", rec.name)


def heating_bound(rec: ExperimentRecord, r_c_grid, slope_factor=1.0, m0: float = M0,
                  hbar: float = HBAR) -> BoundCurve:
    """Largest ``lam`` whose heating power stays below ``observable_limit``.

    The free-particle heating law is summed over constituents, so the total
    mass enters. ``slope_factor`` rescales the heating rate (model variants).
    """
    if rec.kind != "heating":
        raise ValueError("heating_bound needs a heating record")
    r_c = np.asarray(r_c_grid, dtype=float)
    lam = rec.observable_limit * 4.0 * m0**2 * r_c**2 / (3.0 * rec.total_mass * hbar**2)
    return BoundCurve(r_c, lam / slope_factor, "upper", rec.name)


def graphene_geometry() -> RigidBodyGeometry:
    area = np.pi * GRAPHENE_RADIUS**2
    n = int(round(area * GRAPHENE_AREAL_DENSITY / M0))
    bulk_density = GRAPHENE_AREAL_DENSITY / GRAPHENE_INTERLAYER
    spacing = (M0 / bulk_density) ** (1.0 / 3.0)
    return RigidBodyGeometry(n, 2.0 * GRAPHENE_RADIUS, spacing)


def macroscopicity_lower_bound(r_c_grid) -> BoundCurve:
    """Smallest ``lam`` that collapses a graphene-disk superposition in 10 ms.

    The superposition distance is the disk diameter.
    """
    r_c = np.asarray(r_c_grid, dtype=float)
    geom = graphene_geometry()
    d = 2.0 * GRAPHENE_RADIUS
    gauss = -np.expm1(-(d**2) / (4.0 * r_c**2))
    lam = 1.0 / (amplification_factor(geom, r_c) * gauss * GRAPHENE_COLLAPSE_TIME)
    return BoundCurve(r_c, lam, "lower", "graphene macroscopicity")


def dissipative_heating_factor(r_c, t_csl: float, m0: float = M0, hbar: float = HBAR,
                               kb: float = K_B) -> np.ndarray:
    """Initial heating slope of dissipative CSL relative to the white model.

    Evaluated per nucleon starting from zero energy; equals ``(1 + k)**-5``.
    """
    out = []
    for r in np.atleast_1d(r_c):
        base = CollapseParams(1.0, float(r))
        derived = derive_dissipative(DissipativeParams(base, m0, t_csl), m0, hbar, kb)
        white = 3.0 * m0 * hbar**2 / (4.0 * m0**2 * r**2)
        out.append(dissipative_initial_slope(0.0, derived) / white)
    return np.array(out)


def curve_for(rec: ExperimentRecord, r_c_grid, variant: ModelVariant = ModelVariant()) -> BoundCurve:
    eta = 1.0
    if variant.kind == "colored":
        eta = colored_power_fraction(rec.duration, variant.omega_c)
    if rec.kind == "interferometric":
        return interferometric_bound(rec, r_c_grid, noise_fraction=eta)
    factor = eta
    if variant.kind == "dissipative":
        factor = dissipative_heating_factor(r_c_grid, variant.t_csl)
    return heating_bound(rec, r_c_grid, slope_factor=factor)


def build_report(records, r_c_grid=None, variant: ModelVariant = ModelVariant(),
                 include_lower_bound: bool = True) -> ExclusionReport:
    """Curves for every record under ``variant`` and verdicts for the canonical points."""
    records = list(records)
    if not records:
        raise ValueError("build_report needs at least one experiment record")
    if r_c_grid is None:
        r_c_grid = default_rc_grid()
    curves = [curve_for(rec, r_c_grid, variant) for rec in records]
    if include_lower_bound:
        curves.append(macroscopicity_lower_bound(r_c_grid))
    points = canonical_points()
    verdicts = {c.source: {name: c.classify(p) for name, p in points.items()} for c in curves}
    return ExclusionReport(curves, verdicts, variant)


def curves_to_csv(curves) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r_c_m", "lambda_per_s", "sense", "source"])
    for c in curves:
        for r, lam in zip(c.r_c, c.lam):
            writer.writerow([f"{r:.8e}", "inf" if np.isinf(lam) else f"{lam:.8e}", c.sense, c.source])
    return buf.getvalue()


def read_curves_csv(text: str) -> list:
    rows = list(csv.DictReader(io.StringIO(text)))
    grouped = {}
    for row in rows:
        grouped.setdefault((row["source"], row["sense"]), []).append(
            (float(row["r_c_m"]), float(row["lambda_per_s"])))
    return [BoundCurve([r for r, _ in pts], [v for _, v in pts], sense, source)
            for (source, sense), pts in grouped.items()]


# -- experiment descriptor files ---------------------------------------------

def _number(value, where, integer=False):
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok:
        kind = "an integer" if integer else "a number"
        raise SchemaError(f"{where}: expected {kind}, got {value!r}")
    return value


def _parse_record(doc, where) -> ExperimentRecord:
    if not isinstance(doc, dict):
        raise SchemaError(f"{where}: expected an object")
    unknown = sorted(set(doc) - _RECORD_FIELDS)
    if unknown:
        raise SchemaError(f"{where}: unknown field(s) {', '.join(map(repr, unknown))}")
    for name in ("name", "kind", "duration", "observable_limit"):
        if name not in doc:
            raise SchemaError(f"{where}: missing required field '{name}'")
    kind = doc["kind"]
    if kind == "interferometric":
        for name in ("separation", "geometry"):
            if name not in doc:
                raise SchemaError(f"{where}: missing required field '{name}' for interferometric records")
    geometry = None
    n = _number(doc["n_nucleons"], f"{where}.n_nucleons", integer=True) if "n_nucleons" in doc else None
    mass = _number(doc["mass"], f"{where}.mass") if "mass" in doc else None
    if "geometry" in doc:
        g = doc["geometry"]
        gwhere = f"{where}.geometry"
        if not isinstance(g, dict):
            raise SchemaError(f"{gwhere}: expected an object")
        unknown = sorted(set(g) - _GEOMETRY_FIELDS)
        if unknown:
            raise SchemaError(f"{gwhere}: unknown field(s) {', '.join(map(repr, unknown))}")
        for name in sorted(_GEOMETRY_FIELDS):
            if name not in g:
                raise SchemaError(f"{gwhere}: missing required field '{name}'")
            if not _number(g[name], f"{gwhere}.{name}") > 0:
                raise SchemaError(f"{gwhere}.{name}: must be positive")
        n_geom = n if n is not None else max(1, int(round((mass or M0) / M0)))
        geometry = RigidBodyGeometry(n_geom, float(g["size"]), float(g["spacing"]))
    duration = float(_number(doc["duration"], f"{where}.duration"))
    limit = float(_number(doc["observable_limit"], f"{where}.observable_limit"))
    separation = None if "separation" not in doc else float(_number(doc["separation"], f"{where}.separation"))
    try:
        return ExperimentRecord(
            name=str(doc["name"]),
            kind=kind,
            duration=duration,
            observable_limit=limit,
            n_nucleons=n,
            mass=None if mass is None else float(mass),
            geometry=geometry,
            separation=separation,
        )
    except SchemaError as err:
        raise SchemaError(f"{where}: {err}") from None


def parse_experiments(doc) -> list:
    if isinstance(doc, list):
        items, base = doc, "experiments"
    elif isinstance(doc, dict):
        unknown = sorted(set(doc) - {"schema_version", "experiments"})
        if unknown:
            raise SchemaError(f"<root>: unknown field(s) {', '.join(map(repr, unknown))}")
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaError(f"<root>.schema_version: expected {SCHEMA_VERSION}, got {version!r}")
        items, base = doc.get("experiments", []), "experiments"
        if not isinstance(items, list):
            raise SchemaError("<root>.experiments: expected a list")
    else:
        raise SchemaError("<root>: expected an object or a list")
    return [_parse_record(item, f"{base}[{i}]") for i, item in enumerate(items)]


def ingest_experiments(path) -> list:
    """Read and validate an experiment descriptor file (JSON)."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise SchemaError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from None
    return parse_experiments(doc)


def dump_experiments(records) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "experiments": [r.to_dict() for r in records]}
    return json.dumps(doc, indent=2)


def emit_experiments(records, path):
    Path(path).write_text(dump_experiments(records) + "\n")
