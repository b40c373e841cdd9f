"""Config ingestion, experiment orchestration and CSV/JSON emission.

YAML config files describe actuators, joints, kinematic chains, lift
scenarios and experiment specs (one top-level section names the type).
Experiments sweep a module operation over uniform grids and write the
result as plot-ready CSV (or JSON) plus a JSON summary; stage boundaries
and other model breakpoints are merged into the grids exactly, so kinks
are never aliased by the sampling step.

Conventions:
  * every CSV column name carries a unit suffix (validate_csv_schema
    enforces the known set),
  * CSV dialect: comma separated, LF line endings, '.' decimal, header row
    mandatory,
  * outputs are byte-identical for identical (spec, seed),
  * config paths resolve against the referencing file's directory, then
    $TENDONSIM_CONFIG_DIR, then the bundled data directory.

The bundled data directory ships reference parameter sets for the two
prototype actuators, a tabulated nonlinear stand-in, joint/arm/lift
scenarios, and one experiment spec per experiment kind.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import yaml

from .dynamics import LiftScenario, simulate_lift
from .elastic import (ActuatorModel, ElasticElementSpec, ElementKind,
                      force_from_displacement)
from .joint import (AntagonisticJointConfig, classify_stage,
                    controllable_stiffness_range, external_force,
                    joint_stiffness, joint_torque, max_allowable_acceleration,
                    max_controllable_torque, absolute_max_torque,
                    stage_boundaries)
from .kinematics import (DHRow, KinematicChain, default_arm, sample_workspace,
                         DEFAULT_ROM_DEG)

__all__ = [
    "ConfigError",
    "ExperimentError",
    "SchemaError",
    "Experiment",
    "GridSpec",
    "ExperimentSpec",
    "LoadedJoint",
    "DATA_DIR",
    "ENV_CONFIG_DIR",
    "parse_config",
    "parse_experiment",
    "run_experiment",
    "validate_csv_schema",
    "main",
]

DATA_DIR = Path(__file__).parent / "data"
ENV_CONFIG_DIR = "TENDONSIM_CONFIG_DIR"

# every emitted column must end in one of these
UNIT_SUFFIXES = (
    "_mm", "_N", "_Nmm", "_Nm", "_rad", "_rad_per_s", "_rad_per_s2",
    "_Nmm_per_rad", "_Nm_per_rad", "_N_per_mm", "_m", "_s", "_W",
    "_count", "_label",
)


class ConfigError(Exception):
    """A config file failed to parse or validate."""

    def __init__(self, path: Union[str, Path], message: str) -> None:
        self.path = str(path)
        super().__init__(f"{path}: {message}")


class ExperimentError(Exception):
    """An experiment failed while evaluating a sweep point."""


class SchemaError(Exception):
    """An emitted CSV violates the unit-suffix header schema."""


class Experiment(Enum):
    FORCE_DISPLACEMENT = "ForceDisplacement"
    STIFFNESS_VS_PRETENSION = "StiffnessVsPretension"
    MAX_ACCELERATION = "MaxAcceleration"
    TORQUE_SURFACE = "TorqueSurface"
    MAX_TORQUE_VS_PRETENSION = "MaxTorqueVsPretension"
    STIFFNESS_RANGE = "StiffnessRange"
    WORKSPACE = "Workspace"
    LIFT = "Lift"


EXPERIMENT_NOTES = {
    Experiment.FORCE_DISPLACEMENT: "tendon force vs displacement curve of one actuator",
    Experiment.STIFFNESS_VS_PRETENSION: "joint stiffness and stage vs pre-tension",
    Experiment.MAX_ACCELERATION: "slack-avoidance acceleration bound vs pre-tension",
    Experiment.TORQUE_SURFACE: "joint torque over (pre-tension, torque displacement)",
    Experiment.MAX_TORQUE_VS_PRETENSION: "controllable torque ceiling vs pre-tension",
    Experiment.STIFFNESS_RANGE: "controllable stiffness range endpoints",
    Experiment.WORKSPACE: "Monte Carlo end-effector point cloud of the arm",
    Experiment.LIFT: "single-joint payload lift trace under saturation",
}


# --------------------------------------------------------------------------
# config plumbing


def _resolve(name: Union[str, Path], base_dir: Optional[Path]) -> Path:
    """Find a config file: absolute, then relative to the referencing file,
    then $TENDONSIM_CONFIG_DIR, then the bundled data directory."""
    p = Path(name)
    if p.is_absolute():
        if p.is_file():
            return p
        raise ConfigError(name, "file not found")
    tried = []
    candidates = []
    if base_dir is not None:
        candidates.append(base_dir / p)
    env_dir = os.environ.get(ENV_CONFIG_DIR)
    if env_dir:
        candidates.append(Path(env_dir) / p)
    candidates.append(Path.cwd() / p)
    candidates.append(DATA_DIR / p)
    for cand in candidates:
        if cand.is_file():
            return cand
        tried.append(str(cand))
    raise ConfigError(name, "file not found; tried " + ", ".join(tried))


def _read_yaml(path: Path) -> dict:
    try:
        with open(path, "r") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(path, f"cannot read: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(path, f"YAML parse error: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(path, "top level must be a mapping")
    return doc


class _Section:
    """A config mapping with typed field access, required-field errors that
    name the field, and unknown-key detection for strict mode."""

    def __init__(self, data: object, path: Path, name: str) -> None:
        if not isinstance(data, dict):
            raise ConfigError(path, f"section '{name}' must be a mapping")
        self.data = data
        self.path = path
        self.name = name
        self.used: set = set()

    def _fail(self, msg: str) -> "ConfigError":
        return ConfigError(self.path, f"section '{self.name}': {msg}")

    def take(self, key: str, required: bool = True, default=None):
        if key in self.data:
            self.used.add(key)
            return self.data[key]
        if required:
            raise self._fail(f"missing field '{key}'")
        return default

    def take_float(self, key: str, required: bool = True,
                   default: Optional[float] = None) -> Optional[float]:
        v = self.take(key, required, default)
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise self._fail(f"field '{key}' must be a number, got {v!r}")
        return float(v)

    def take_int(self, key: str, required: bool = True,
                 default: Optional[int] = None) -> Optional[int]:
        v = self.take(key, required, default)
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, int):
            raise self._fail(f"field '{key}' must be an integer, got {v!r}")
        return v

    def take_str(self, key: str, required: bool = True,
                 default: Optional[str] = None) -> Optional[str]:
        v = self.take(key, required, default)
        if v is None:
            return None
        if not isinstance(v, str):
            raise self._fail(f"field '{key}' must be a string, got {v!r}")
        return v

    def finish(self, strict: bool) -> None:
        extra = sorted(set(self.data) - self.used)
        if extra and strict:
            raise self._fail(f"unknown keys {extra}")


def _load_table_csv(path: Path) -> Tuple[Tuple[float, float], ...]:
    """Two-column (displacement_mm, force_N) curve with a mandatory header."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise ConfigError(path, "empty table file")
            if [h.strip() for h in header] != ["displacement_mm", "force_N"]:
                raise ConfigError(path, "table header must be exactly "
                                        "'displacement_mm,force_N'")
            rows = []
            for i, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 2:
                    raise ConfigError(path, f"line {i}: expected 2 columns")
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError as exc:
                    raise ConfigError(path, f"line {i}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(path, f"cannot read: {exc}") from exc
    return tuple(rows)


# --------------------------------------------------------------------------
# typed config parsers


def parse_actuator(path: Path, strict: bool = False) -> ActuatorModel:
    doc = _read_yaml(path)
    sec = _Section(doc.get("actuator"), path, "actuator")
    label = sec.take_str("label", required=False, default=path.stem)
    kind = sec.take_str("kind")
    k_t = sec.take_float("k_t")
    rated_force = sec.take_float("rated_force")
    rated_speed = sec.take_float("rated_speed")

    try:
        if kind == ElementKind.TORSION_SPRING_INTERNAL.value:
            k_e = sec.take_float("k_e", required=False)
            k_ts = sec.take_float("k_ts", required=False)
            r = sec.take_float("pulley_radius_r")
            mu_p = sec.take_float("mu_p", required=False, default=0.0)
            F_tm = sec.take_float("F_tm")
            d_max = _element_travel(sec, F_tm, k_t)
            element = ElasticElementSpec.torsion_internal(
                k_e=k_e, k_ts=k_ts, pulley_radius_r=r, mu_p=mu_p,
                F_tm=F_tm, d_max=d_max)
        elif kind == ElementKind.COMPRESSION_SPRING_EXTERNAL.value:
            k_cs = sec.take_float("k_cs")
            F_tm = sec.take_float("F_tm")
            d_max = _element_travel(sec, F_tm, k_t)
            element = ElasticElementSpec.compression_external(
                k_cs=k_cs, F_tm=F_tm, d_max=d_max)
        elif kind == ElementKind.TABULATED.value:
            table_name = sec.take_str("table")
            table = _load_table_csv(_resolve(table_name, path.parent))
            element = ElasticElementSpec.tabulated(table)
        else:
            raise ConfigError(path, f"section 'actuator': field 'kind' must "
                                    f"be one of torsion_internal, "
                                    f"compression_external, tabulated; "
                                    f"got {kind!r}")
        sec.finish(strict)
        return ActuatorModel(element=element, k_t=k_t,
                             rated_force=rated_force,
                             rated_speed=rated_speed, label=label)
    except ValueError as exc:
        raise ConfigError(path, f"section 'actuator': {exc}") from exc


def _element_travel(sec: _Section, F_tm: float, k_t: float) -> Optional[float]:
    """Element travel from either d_max_element, or d_m_total minus the
    tendon stretch at F_tm (the published tables quote totals)."""
    d_el = sec.take_float("d_max_element", required=False)
    d_tot = sec.take_float("d_m_total", required=False)
    if d_el is not None and d_tot is not None:
        raise sec._fail("give at most one of d_max_element / d_m_total")
    if d_tot is not None:
        d_el = d_tot - F_tm / k_t
        if d_el <= 0:
            raise sec._fail(f"d_m_total={d_tot} leaves no element travel "
                            f"after tendon stretch {F_tm / k_t:.4f} mm")
    return d_el


@dataclass(frozen=True)
class LoadedJoint:
    """A joint config plus the test deflection delta (rad) it quotes."""

    joint: AntagonisticJointConfig
    delta: float


def parse_joint(path: Path, strict: bool = False) -> LoadedJoint:
    doc = _read_yaml(path)
    sec = _Section(doc.get("joint"), path, "joint")
    a1 = parse_actuator(_resolve(sec.take_str("actuator_1"), path.parent), strict)
    a2 = parse_actuator(_resolve(sec.take_str("actuator_2"), path.parent), strict)
    R = sec.take_float("R")
    mu_s = sec.take_float("mu_s")
    inertia = sec.take_float("inertia_I")
    delta = sec.take_float("delta", required=False, default=0.087)
    sec.finish(strict)
    if not delta > 0:
        raise ConfigError(path, f"section 'joint': delta must be > 0, got {delta}")
    try:
        joint = AntagonisticJointConfig(actuator_1=a1, actuator_2=a2, R=R,
                                        mu_s=mu_s, inertia_I=inertia)
    except ValueError as exc:
        raise ConfigError(path, f"section 'joint': {exc}") from exc
    return LoadedJoint(joint=joint, delta=delta)


_LINK_NAMES = ("b", "c", "d")


def parse_chain(path: Path, strict: bool = False) -> KinematicChain:
    doc = _read_yaml(path)
    sec = _Section(doc.get("chain"), path, "chain")
    links_raw = sec.take("link_lengths")
    links = _Section(links_raw, path, "chain.link_lengths")
    lengths = {name: links.take_float(name) for name in _LINK_NAMES}
    links.finish(strict)

    rom_raw = sec.take("rom_deg", required=False)
    rom_deg = dict(DEFAULT_ROM_DEG)
    if rom_raw is not None:
        rsec = _Section(rom_raw, path, "chain.rom_deg")
        for name in list(rom_raw):
            pair = rsec.take(name)
            if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                    or any(isinstance(v, bool) or not isinstance(v, (int, float))
                           for v in pair)):
                raise ConfigError(path, f"section 'chain.rom_deg': '{name}' "
                                        f"must be a [lo, hi] pair of numbers")
            rom_deg[name] = (float(pair[0]), float(pair[1]))
        rsec.finish(strict)

    rows_raw = sec.take("rows", required=False)
    sec.finish(strict)
    if rows_raw is None:
        try:
            return default_arm(rom_deg=rom_deg, **lengths)
        except ValueError as exc:
            raise ConfigError(path, f"section 'chain': {exc}") from exc

    if not isinstance(rows_raw, list):
        raise ConfigError(path, "section 'chain': 'rows' must be a list")
    rows = []
    for i, rdata in enumerate(rows_raw, start=1):
        rsec = _Section(rdata, path, f"chain.rows[{i}]")
        a = _length_field(rsec, "a", lengths, path)
        d = _length_field(rsec, "d", lengths, path)
        alpha = math.radians(rsec.take_float("alpha_deg"))
        offset = math.radians(rsec.take_float("theta_offset_deg"))
        sign = rsec.take_int("joint_sign", required=False, default=+1)
        name = rsec.take_str("joint")
        rsec.finish(strict)
        try:
            rows.append(DHRow(a=a, d=d, alpha=alpha, theta_offset=offset,
                              joint_sign=sign, joint_name=name))
        except ValueError as exc:
            raise ConfigError(path, f"section 'chain.rows[{i}]': {exc}") from exc
    rom = {name: (math.radians(lo), math.radians(hi))
           for name, (lo, hi) in rom_deg.items()}
    try:
        return KinematicChain(rows=tuple(rows), link_lengths=lengths, rom=rom)
    except ValueError as exc:
        raise ConfigError(path, f"section 'chain': {exc}") from exc


def _length_field(rsec: _Section, key: str, lengths: Dict[str, float],
                  path: Path) -> float:
    """A D-H length is a number in meters or a named link length."""
    v = rsec.take(key, required=False, default=0.0)
    if isinstance(v, str):
        if v not in lengths:
            raise ConfigError(path, f"section '{rsec.name}': '{key}' names "
                                    f"unknown link length {v!r}")
        return lengths[v]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"section '{rsec.name}': '{key}' must be a "
                                f"number or a link-length name")
    return float(v)


def parse_lift(path: Path, strict: bool = False) -> LiftScenario:
    doc = _read_yaml(path)
    sec = _Section(doc.get("lift"), path, "lift")
    label = sec.take_str("label", required=False, default=path.stem)
    act_names = sec.take("actuators")
    if not isinstance(act_names, list) or not act_names:
        raise ConfigError(path, "section 'lift': 'actuators' must be a "
                                "nonempty list of actuator config files")
    actuators = tuple(parse_actuator(_resolve(n, path.parent), strict)
                      for n in act_names)
    kwargs = dict(
        payload_mass=sec.take_float("payload_mass"),
        limb_mass=sec.take_float("limb_mass"),
        limb_com_distance=sec.take_float("limb_com_distance"),
        payload_distance=sec.take_float("payload_distance"),
        joint_R=sec.take_float("joint_R"),
        theta_start=math.radians(sec.take_float("theta_start_deg")),
        theta_target=math.radians(sec.take_float("theta_target_deg")),
        dt=sec.take_float("dt"),
        t_max=sec.take_float("t_max"),
        gravity=sec.take_float("gravity", required=False, default=9.81),
    )
    sec.finish(strict)
    try:
        return LiftScenario(actuators=actuators, label=label, **kwargs)
    except ValueError as exc:
        raise ConfigError(path, f"section 'lift': {exc}") from exc


@dataclass(frozen=True)
class GridSpec:
    """Uniform inclusive sweep grid."""

    start: float
    stop: float
    step: float

    def __post_init__(self) -> None:
        if not all(map(math.isfinite, (self.start, self.stop, self.step))):
            raise ValueError("grid start/stop/step must be finite")
        if self.step <= 0:
            raise ValueError(f"grid step must be > 0, got {self.step}")
        if self.stop < self.start:
            raise ValueError(f"grid stop {self.stop} below start {self.start}")

    def points(self) -> List[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        pts = [self.start + i * self.step for i in range(n + 1)]
        if self.stop - pts[-1] > 1e-9 * max(1.0, abs(self.stop)):
            pts.append(self.stop)
        return pts


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: Experiment
    model: object                      # parsed config object
    sweeps: Dict[str, GridSpec]
    output: str
    fmt: str = "csv"
    seed: Optional[int] = None
    delta: Optional[float] = None
    n: Optional[int] = None
    source: Optional[Path] = None


_SWEEP_VARS = {
    Experiment.FORCE_DISPLACEMENT: ("d",),
    Experiment.STIFFNESS_VS_PRETENSION: ("d_s",),
    Experiment.MAX_ACCELERATION: ("d_s",),
    Experiment.TORQUE_SURFACE: ("d_s", "d_t"),
    Experiment.MAX_TORQUE_VS_PRETENSION: ("d_s",),
    Experiment.STIFFNESS_RANGE: (),
    Experiment.WORKSPACE: (),
    Experiment.LIFT: (),
}

_CONFIG_PARSERS = {
    Experiment.FORCE_DISPLACEMENT: parse_actuator,
    Experiment.STIFFNESS_VS_PRETENSION: parse_joint,
    Experiment.MAX_ACCELERATION: parse_joint,
    Experiment.TORQUE_SURFACE: parse_joint,
    Experiment.MAX_TORQUE_VS_PRETENSION: parse_joint,
    Experiment.STIFFNESS_RANGE: parse_joint,
    Experiment.WORKSPACE: parse_chain,
    Experiment.LIFT: parse_lift,
}


def parse_experiment(path: Path, strict: bool = False) -> ExperimentSpec:
    doc = _read_yaml(path)
    sec = _Section(doc.get("experiment"), path, "experiment")
    kind_name = sec.take_str("kind")
    try:
        experiment = Experiment(kind_name)
    except ValueError:
        known = ", ".join(e.value for e in Experiment)
        raise ConfigError(path, f"section 'experiment': unknown kind "
                                f"{kind_name!r}; one of {known}") from None
    config_name = sec.take_str("config")
    model = _CONFIG_PARSERS[experiment](_resolve(config_name, path.parent),
                                        strict)

    sweeps: Dict[str, GridSpec] = {}
    sweep_raw = sec.take("sweep", required=False, default={})
    ssec = _Section(sweep_raw, path, "experiment.sweep")
    for var in _SWEEP_VARS[experiment]:
        gdata = ssec.take(var)
        gsec = _Section(gdata, path, f"experiment.sweep.{var}")
        try:
            sweeps[var] = GridSpec(start=gsec.take_float("start"),
                                   stop=gsec.take_float("stop"),
                                   step=gsec.take_float("step"))
        except ValueError as exc:
            raise ConfigError(path, f"section 'experiment.sweep.{var}': "
                                    f"{exc}") from exc
        gsec.finish(strict)
    ssec.finish(strict)

    spec = ExperimentSpec(
        experiment=experiment, model=model, sweeps=sweeps,
        output=sec.take_str("output"),
        fmt=sec.take_str("format", required=False, default="csv"),
        seed=sec.take_int("seed", required=False),
        delta=sec.take_float("delta", required=False),
        n=sec.take_int("n", required=False),
        source=path)
    sec.finish(strict)
    if spec.fmt not in ("csv", "json"):
        raise ConfigError(path, f"section 'experiment': format must be csv "
                                f"or json, got {spec.fmt!r}")
    if experiment is Experiment.WORKSPACE and (spec.n or 0) < 1:
        raise ConfigError(path, "section 'experiment': Workspace needs n >= 1")
    return spec


_PARSE_DISPATCH = {
    "actuator": parse_actuator,
    "joint": parse_joint,
    "chain": parse_chain,
    "lift": parse_lift,
    "experiment": parse_experiment,
}


def parse_config(path: Union[str, Path], strict: bool = False):
    """Parse any config file; the top-level section names the type.

    Returns ActuatorModel, LoadedJoint, KinematicChain, LiftScenario or
    ExperimentSpec with all invariants checked.
    """
    path = Path(path)
    doc = _read_yaml(path)
    kinds = [k for k in _PARSE_DISPATCH if k in doc]
    if len(kinds) != 1:
        raise ConfigError(path, f"expected exactly one of the sections "
                                f"{sorted(_PARSE_DISPATCH)}, found {kinds}")
    if strict:
        extra = sorted(set(doc) - set(kinds))
        if extra:
            raise ConfigError(path, f"unknown top-level keys {extra}")
    return _PARSE_DISPATCH[kinds[0]](path, strict)


# --------------------------------------------------------------------------
# emission


def _fmt_num(v: float) -> str:
    return format(float(v), ".12g")


def _write_rows(path: Path, header: Sequence[str], rows: Sequence[Sequence],
                fmt: str) -> None:
    if fmt == "json":
        payload = {"columns": list(header),
                   "rows": [[c if isinstance(c, str) else float(c) for c in r]
                            for r in rows]}
        _write_json(path, payload)
        return
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([c if isinstance(c, str) else _fmt_num(c)
                             for c in row])


def _write_json(path: Path, obj: dict) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def validate_csv_schema(path: Union[str, Path]) -> None:
    """Check the unit-suffix header contract of an emitted CSV.

    Every column name must end in a documented unit suffix; *_label columns
    hold nonempty strings, all other cells parse as finite floats; rows are
    rectangular. Raises SchemaError on the first violation.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise SchemaError(f"{path}: missing header row")
        for col in header:
            if not any(col.endswith(sfx) for sfx in UNIT_SUFFIXES):
                raise SchemaError(f"{path}: column '{col}' lacks a known "
                                  f"unit suffix {UNIT_SUFFIXES}")
        is_label = [col.endswith("_label") for col in header]
        for i, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise SchemaError(f"{path}: line {i}: expected "
                                  f"{len(header)} cells, got {len(row)}")
            for col, cell, lab in zip(header, row, is_label):
                if lab:
                    if not cell:
                        raise SchemaError(f"{path}: line {i}: empty label "
                                          f"in '{col}'")
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise SchemaError(f"{path}: line {i}: non-numeric cell "
                                      f"{cell!r} in '{col}'") from None
                if not math.isfinite(v):
                    raise SchemaError(f"{path}: line {i}: non-finite cell "
                                      f"in '{col}'")


def _merge_exact(base: List[float], exact: Sequence[float]) -> List[float]:
    """Sorted union of grid points and exactly computed breakpoints inside
    the grid span; near-duplicates collapse onto the exact value."""
    if not base:
        return sorted(exact)
    lo, hi = base[0], base[-1]
    tagged = [(v, False) for v in base]
    tagged += [(v, True) for v in exact if lo <= v <= hi]
    tagged.sort()
    out: List[Tuple[float, bool]] = []
    for v, is_exact in tagged:
        if out and abs(v - out[-1][0]) <= 1e-9:
            if is_exact and not out[-1][1]:
                out[-1] = (v, True)
            continue
        out.append((v, is_exact))
    return [v for v, _ in out]


@dataclass(frozen=True)
class ExperimentResult:
    output_path: Path
    summary_path: Path
    summary: dict


def _expect(spec: ExperimentSpec, cls, what: str):
    if not isinstance(spec.model, cls):
        raise ExperimentError(f"{spec.experiment.value} needs a {what} "
                              f"config, got {type(spec.model).__name__}")
    return spec.model


def _sweep_eval(fn, var_values, label: str):
    """Evaluate fn over points, re-raising with the sweep coordinate."""
    rows = []
    for coords in var_values:
        try:
            rows.append(fn(*coords))
        except ValueError as exc:
            at = ", ".join(f"{v:g}" for v in coords)
            raise ExperimentError(f"{label} at ({at}): {exc}") from exc
    return rows


def run_experiment(spec: ExperimentSpec, out_dir: Union[str, Path] = ".",
                   fmt: Optional[str] = None,
                   seed: Optional[int] = None) -> ExperimentResult:
    """Run one experiment spec: write the data file and a JSON summary.

    fmt and seed override the spec when given. Deterministic: identical
    (spec, seed) produce byte-identical files.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = fmt or spec.fmt
    seed = seed if seed is not None else spec.seed

    exp = spec.experiment
    if exp is Experiment.FORCE_DISPLACEMENT:
        header, rows, summary = _run_force_displacement(spec)
    elif exp is Experiment.STIFFNESS_VS_PRETENSION:
        header, rows, summary = _run_stiffness_sweep(spec)
    elif exp is Experiment.MAX_ACCELERATION:
        header, rows, summary = _run_acceleration(spec)
    elif exp is Experiment.TORQUE_SURFACE:
        header, rows, summary = _run_torque_surface(spec)
    elif exp is Experiment.MAX_TORQUE_VS_PRETENSION:
        header, rows, summary = _run_max_torque(spec)
    elif exp is Experiment.STIFFNESS_RANGE:
        header, rows, summary = _run_stiffness_range(spec)
    elif exp is Experiment.WORKSPACE:
        header, rows, summary = _run_workspace(spec, seed)
    elif exp is Experiment.LIFT:
        header, rows, summary = _run_lift(spec)
    else:  # pragma: no cover - enum is closed
        raise ExperimentError(f"unhandled experiment {exp}")

    out_path = (out_dir / spec.output).with_suffix("." + fmt)
    _write_rows(out_path, header, rows, fmt)
    if fmt == "csv":
        validate_csv_schema(out_path)
    summary = {"experiment": exp.value, "rows": len(rows), **summary}
    summary_path = out_path.with_name(out_path.stem + "_summary.json")
    _write_json(summary_path, summary)
    return ExperimentResult(output_path=out_path, summary_path=summary_path,
                            summary=summary)


def _delta_of(spec: ExperimentSpec, loaded: LoadedJoint) -> float:
    return spec.delta if spec.delta is not None else loaded.delta


def _run_force_displacement(spec: ExperimentSpec):
    actuator = _expect(spec, ActuatorModel, "actuator")
    bp = actuator.d_max_total
    pts = _merge_exact(spec.sweeps["d"].points(), [bp])
    rows = _sweep_eval(
        lambda d: (d, force_from_displacement(actuator, d)),
        [(d,) for d in pts], "force_from_displacement")
    h = min(0.01, bp / 100.0)
    slope_below = (force_from_displacement(actuator, bp)
                   - force_from_displacement(actuator, bp - h)) / h
    slope_above = (force_from_displacement(actuator, bp + h)
                   - force_from_displacement(actuator, bp)) / h
    summary = {
        "operation": "force_from_displacement",
        "actuator_label": actuator.label,
        "breakpoint_mm": bp,
        "breakpoint_N": actuator.F_tm,
        "slope_below_N_per_mm": slope_below,
        "slope_above_N_per_mm": slope_above,
        "force_max_N": rows[-1][1],
    }
    return ["displacement_mm", "force_N"], rows, summary


def _run_stiffness_sweep(spec: ExperimentSpec):
    loaded = _expect(spec, LoadedJoint, "joint")
    joint, delta = loaded.joint, _delta_of(spec, loaded)
    bounds = stage_boundaries(joint, delta)
    pts = _merge_exact(spec.sweeps["d_s"].points(), bounds)

    def row(d_s):
        return (d_s, classify_stage(joint, d_s, delta).value,
                external_force(joint, delta, d_s),
                joint_stiffness(joint, delta, d_s))

    rows = _sweep_eval(row, [(d,) for d in pts], "joint_stiffness")
    ks = [r[3] for r in rows]
    summary = {
        "operation": "joint_stiffness",
        "delta_rad": delta,
        "stage_boundaries_mm": list(bounds),
        "K_s_min_Nmm_per_rad": min(ks),
        "K_s_max_Nmm_per_rad": max(ks),
    }
    return (["d_s_mm", "stage_label", "F_e_N", "K_s_Nmm_per_rad"],
            rows, summary)


def _run_acceleration(spec: ExperimentSpec):
    loaded = _expect(spec, LoadedJoint, "joint")
    joint = loaded.joint
    kink = joint.d_m / 2.0
    pts = _merge_exact(spec.sweeps["d_s"].points(), [kink, joint.d_m])
    rows = _sweep_eval(
        lambda d_s: (d_s, max_allowable_acceleration(joint, d_s)),
        [(d,) for d in pts], "max_allowable_acceleration")
    summary = {
        "operation": "max_allowable_acceleration",
        "slope_change_at_mm": kink,
        "acc_max_rad_per_s2": max(r[1] for r in rows),
    }
    return ["d_s_mm", "theta_ddot_max_rad_per_s2"], rows, summary


def _run_torque_surface(spec: ExperimentSpec):
    loaded = _expect(spec, LoadedJoint, "joint")
    joint = loaded.joint
    ds_pts = spec.sweeps["d_s"].points()
    dt_pts = spec.sweeps["d_t"].points()
    coords = [(ds, dt) for ds in ds_pts for dt in dt_pts]
    rows = _sweep_eval(
        lambda ds, dt: (ds, dt, joint_torque(joint, ds, dt)),
        coords, "joint_torque")
    peak = max(rows, key=lambda r: r[2])
    summary = {
        "operation": "joint_torque",
        "tau_max_Nmm": peak[2],
        "tau_max_at_d_s_mm": peak[0],
        "tau_max_at_d_t_mm": peak[1],
    }
    return ["d_s_mm", "d_t_mm", "tau_Nmm"], rows, summary


def _run_max_torque(spec: ExperimentSpec):
    loaded = _expect(spec, LoadedJoint, "joint")
    joint = loaded.joint
    pts = _merge_exact(spec.sweeps["d_s"].points(),
                       [joint.d_m / 2.0, joint.d_m])
    rows = _sweep_eval(
        lambda d_s: (d_s, max_controllable_torque(joint, d_s)),
        [(d,) for d in pts], "max_controllable_torque")
    summary = {
        "operation": "max_controllable_torque",
        "absolute_max_torque_Nmm": absolute_max_torque(joint),
        "tau_at_zero_pretension_Nmm": rows[0][1],
    }
    return ["d_s_mm", "tau_max_Nmm"], rows, summary


def _run_stiffness_range(spec: ExperimentSpec):
    loaded = _expect(spec, LoadedJoint, "joint")
    joint, delta = loaded.joint, _delta_of(spec, loaded)
    try:
        rng = controllable_stiffness_range(joint, delta)
    except ValueError as exc:
        raise ExperimentError(f"controllable_stiffness_range: {exc}") from exc
    rows = [(rng.K_smin, rng.K_smax, rng.delta_K)]
    summary = {
        "operation": "controllable_stiffness_range",
        "delta_rad": delta,
        "K_smin_Nmm_per_rad": rng.K_smin,
        "K_smax_Nmm_per_rad": rng.K_smax,
        "delta_K_Nmm_per_rad": rng.delta_K,
        "K_smin_Nm_per_rad": rng.K_smin / 1000.0,
        "K_smax_Nm_per_rad": rng.K_smax / 1000.0,
        "delta_K_Nm_per_rad": rng.delta_K / 1000.0,
        "evaluated_at_d_s_mm": [delta * joint.R, joint.d_m / 2.0],
    }
    return (["K_smin_Nmm_per_rad", "K_smax_Nmm_per_rad",
             "delta_K_Nmm_per_rad"], rows, summary)


def _run_workspace(spec: ExperimentSpec, seed: Optional[int]):
    chain = _expect(spec, KinematicChain, "chain")
    if seed is None:
        raise ExperimentError("Workspace needs a seed (spec field or --seed)")
    cloud = sample_workspace(chain, spec.n, seed)
    rows = [tuple(p) for p in cloud.points]
    summary = {
        "operation": "sample_workspace",
        "seed": seed,
        "n_samples": cloud.n_samples,
        **cloud.stats,
    }
    return ["x_m", "y_m", "z_m"], rows, summary


def _run_lift(spec: ExperimentSpec):
    scenario = _expect(spec, LiftScenario, "lift")
    trace = simulate_lift(scenario)
    rows = list(zip(trace.t, trace.theta, trace.omega, trace.tau,
                    trace.tau_gravity, trace.power))
    summary = {
        "operation": "simulate_lift",
        "peak_power_W": trace.peak_power,
        "peak_torque_Nm": trace.peak_torque,
        "time_to_target_s": trace.time_to_target,
        "reached_target": trace.reached_target,
    }
    return (["t_s", "theta_rad", "omega_rad_per_s", "tau_Nm",
             "tau_gravity_Nm", "power_W"], rows, summary)


# --------------------------------------------------------------------------
# command line


def _describe(obj) -> str:
    if isinstance(obj, ActuatorModel):
        return f"actuator '{obj.label}' (d_max_total {obj.d_max_total:.4f} mm)"
    if isinstance(obj, LoadedJoint):
        return (f"joint pair '{obj.joint.actuator_1.label}' "
                f"(R {obj.joint.R} mm, delta {obj.delta} rad)")
    if isinstance(obj, KinematicChain):
        return f"chain with 7 joints (reach limit {obj.reach_limit:.3f} m)"
    if isinstance(obj, LiftScenario):
        return f"lift scenario '{obj.label}'"
    if isinstance(obj, ExperimentSpec):
        return f"experiment {obj.experiment.value} -> {obj.output}"
    return type(obj).__name__  # pragma: no cover


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="tendonsim",
        description="Tendon-driven compliant actuator and joint simulation. "
                    "Config files resolve against the current directory, "
                    f"${ENV_CONFIG_DIR}, then the bundled data directory.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="parse a config file and check "
                                            "all its invariants")
    p_val.add_argument("config")
    p_val.add_argument("--strict", action="store_true",
                       help="also reject unknown keys")

    p_run = sub.add_parser("run", help="run an experiment spec")
    p_run.add_argument("spec")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--format", choices=("csv", "json"), default=None,
                       help="override the spec's output format")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the spec's RNG seed")
    p_run.add_argument("--strict", action="store_true",
                       help="also reject unknown config keys")

    sub.add_parser("list-experiments", help="list experiment kinds")

    args = parser.parse_args(argv)

    if args.command == "list-experiments":
        for exp in Experiment:
            print(f"{exp.value}: {EXPERIMENT_NOTES[exp]}")
        return 0

    if args.command == "validate":
        try:
            obj = parse_config(_resolve(args.config, None), args.strict)
        except ConfigError as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return 1
        print(f"OK: {_describe(obj)}")
        return 0

    # run
    try:
        spec_path = _resolve(args.spec, None)
        spec = parse_experiment(spec_path, args.strict)
        result = run_experiment(spec, out_dir=args.out, fmt=args.format,
                                seed=args.seed)
    except (ConfigError, ExperimentError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
