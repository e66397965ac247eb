"""Monte Carlo error propagation for the heralded Dicke fidelity.

Every sample draws an independently perturbed geometry from
``(rng_seed, sample_index)``, heralds the register and scores it against the
target Dicke state. Samples are evaluated in contiguous index blocks and
reduced in index order, so reports do not depend on the worker count.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .detection import (
    DestructiveInterferenceError,
    Engine,
    run_protocol,
)
from .errors import DickeHeraldError, InvalidTargetError
from .geometry import (
    ChainGeometry,
    DetectorSpec,
    PerturbationSpec,
    dicke_detectors,
    perturbation_variances,
    phase_jacobian,
    phase_matrix,
    sample_perturbed_phase_matrix,
    wrapped_distance,
)
from .state import (
    DickeTarget,
    EmissionModel,
    Level,
    Polarizer,
    as_level,
    fidelity,
    make_dicke_state,
)

log = logging.getLogger(__name__)

WORKERS_ENV = "DICKE_HERALD_WORKERS"
FAILURE_NORM2 = 1e-15
WITNESS_THRESHOLD = 2 / 3
SCAN_AXES = ("lateral_sigma", "angular_halfwidth", "spacing_error", "wavelength")


@dataclass(frozen=True)
class MonteCarloReport:
    num_samples: int
    num_failures: int
    mean_fidelity: float
    fidelity_stddev: float
    fidelity_stderr: float
    mean_relative_rate: float
    quantiles: tuple[float, float, float]
    seed: int
    first_order_fidelity: float | None
    config_echo: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self) | {"quantiles": list(self.quantiles)}


@dataclass(frozen=True)
class WitnessVerdict:
    fidelity: float
    threshold: float
    entangled_certified: bool


def witness_check(fidelity_value: float, threshold: float = WITNESS_THRESHOLD) -> WitnessVerdict:
    """Certify entanglement when the fidelity strictly beats ``threshold``."""
    if not 0.0 <= fidelity_value <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {fidelity_value}")
    return WitnessVerdict(fidelity_value, threshold, fidelity_value > threshold)


def _jsonable(obj):
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _resolve_levels(detectors, outcomes):
    if outcomes is None:
        outcomes = [d.polarizer for d in detectors]
    levels = [as_level(o) for o in outcomes]
    if len(levels) != len(detectors):
        raise ValueError("need one outcome per detector")
    return levels


def _check_target(target: DickeTarget, levels):
    n1 = sum(lv is Level.LEVEL1 for lv in levels)
    if target.num_qubits != len(levels) or target.num_ones != n1:
        raise InvalidTargetError(
            f"target (N={target.num_qubits}, 2m={target.spin_projection_times_two}) "
            f"cannot be heralded by {n1} sigma- detections out of {len(levels)}"
        )


def first_order_fidelity(
    geom: ChainGeometry,
    detectors: Sequence[DetectorSpec],
    pert: PerturbationSpec,
    target: DickeTarget,
    outcomes=None,
) -> float | None:
    """Small-perturbation estimate ``1 - E[Var_s(theta_s)]``.

    ``theta_s`` is the first-order phase error of the amplitude on basis
    string ``s``: the mean, over the assignments feeding ``s``, of the summed
    path-phase errors. Only defined when every nominal phase is a multiple
    of 2 pi; returns ``None`` otherwise.
    """
    levels = _resolve_levels(detectors, outcomes)
    _check_target(target, levels)
    nominal = phase_matrix(geom, detectors)
    if wrapped_distance(nominal).max() > 1e-9:
        return None
    n = geom.num_emitters
    counts = {lv: sum(x is lv for x in levels) for lv in (Level.LEVEL0, Level.LEVEL1)}
    keys = list(make_dicke_state(target).amplitudes)
    G = np.zeros((len(keys), n * n))
    for s, key in enumerate(keys):
        for det, lv in enumerate(levels):
            for j, c in enumerate(key):
                if c == lv.value:
                    G[s, det * n + j] = 1.0 / counts[lv]
    GB = G @ phase_jacobian(geom, detectors)
    cov = (GB * perturbation_variances(pert, n, len(detectors))) @ GB.T
    D = len(keys)
    P = np.eye(D) - np.full((D, D), 1.0 / D)
    return float(1.0 - np.trace(P @ cov @ P) / D)


def _evaluate_block(args):
    geom, detectors, levels, pert, target, emission, engine, start, stop = args
    target_state = make_dicke_state(target)
    fids = np.full(stop - start, np.nan)
    rates = np.zeros(stop - start)
    for i, idx in enumerate(range(start, stop)):
        phases = sample_perturbed_phase_matrix(geom, detectors, pert, idx)
        try:
            res = run_protocol(geom.num_emitters, phases, levels, emission, engine=engine)
        except DestructiveInterferenceError:
            continue
        rates[i] = res.relative_rate
        if res.squared_norm >= FAILURE_NORM2:
            fids[i] = fidelity(res.final_state, target_state)
    return fids, rates


def _worker_count(workers):
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, workers)


def monte_carlo_fidelity(
    geom: ChainGeometry,
    detectors: Sequence[DetectorSpec],
    pert: PerturbationSpec,
    target: DickeTarget,
    num_samples: int,
    outcomes=None,
    emission: EmissionModel | None = None,
    engine: Engine | str = Engine.SEQUENTIAL,
    workers: int | None = None,
    config_echo: dict | None = None,
) -> MonteCarloReport:
    """Ensemble fidelity of the heralded state under random geometric errors.

    Samples whose unnormalized norm falls below ``FAILURE_NORM2`` count as
    heralding failures: they are excluded from the fidelity statistics and
    reported in ``num_failures``. ``fidelity_stderr`` uses the number of
    successful samples.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be at least 1")
    levels = _resolve_levels(detectors, outcomes)
    _check_target(target, levels)
    emission = emission or EmissionModel()
    engine = Engine(engine)
    workers = _worker_count(workers)

    n_blocks = min(num_samples, workers * 4 if workers > 1 else 1)
    edges = np.linspace(0, num_samples, n_blocks + 1).astype(int)
    jobs = [
        (geom, list(detectors), levels, pert, target, emission, engine, int(a), int(b))
        for a, b in zip(edges[:-1], edges[1:])
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_evaluate_block, jobs))
    else:
        parts = [_evaluate_block(job) for job in jobs]
    fids = np.concatenate([p[0] for p in parts])
    rates = np.concatenate([p[1] for p in parts])

    ok = fids[~np.isnan(fids)]
    n_ok = ok.size
    if n_ok:
        mean = float(np.mean(ok))
        std = float(np.std(ok, ddof=1)) if n_ok > 1 else 0.0
        quant = tuple(float(q) for q in np.quantile(ok, [0.05, 0.5, 0.95]))
    else:
        mean = std = math.nan
        quant = (math.nan,) * 3
    if config_echo is None:
        config_echo = _jsonable({
            "geometry": geom,
            "detectors": list(detectors),
            "outcomes": levels,
            "perturbation": pert,
            "target": target,
            "emission": emission,
            "num_samples": num_samples,
            "engine": engine,
        })
    return MonteCarloReport(
        num_samples=num_samples,
        num_failures=num_samples - n_ok,
        mean_fidelity=min(1.0, mean) if n_ok else mean,
        fidelity_stddev=std,
        fidelity_stderr=std / math.sqrt(n_ok) if n_ok else math.nan,
        mean_relative_rate=float(np.mean(rates)),
        quantiles=quant,
        seed=pert.rng_seed,
        first_order_fidelity=first_order_fidelity(geom, detectors, pert, target, levels),
        config_echo=config_echo,
    )


@dataclass(frozen=True)
class MonteCarloSetup:
    """Everything a Monte Carlo run needs; detectors ``None`` means Dicke placement."""

    geometry: ChainGeometry
    polarizers: tuple[Polarizer, ...]
    perturbation: PerturbationSpec = PerturbationSpec()
    target: DickeTarget | None = None
    num_samples: int = 10_000
    emission: EmissionModel = EmissionModel()
    detectors: tuple[DetectorSpec, ...] | None = None
    engine: Engine = Engine.SEQUENTIAL

    def resolved_detectors(self) -> list[DetectorSpec]:
        if self.detectors is not None:
            return list(self.detectors)
        return dicke_detectors(self.geometry, self.polarizers)

    def resolved_target(self) -> DickeTarget:
        if self.target is not None:
            return self.target
        n1 = sum(Polarizer(p) is Polarizer.SIGMA_MINUS for p in self.polarizers)
        return DickeTarget.from_ones(len(self.polarizers), n1)

    def run(self, workers: int | None = None, config_echo: dict | None = None) -> MonteCarloReport:
        return monte_carlo_fidelity(
            self.geometry,
            self.resolved_detectors(),
            self.perturbation,
            self.resolved_target(),
            self.num_samples,
            emission=self.emission,
            engine=self.engine,
            workers=workers,
            config_echo=config_echo,
        )


@dataclass(frozen=True)
class ScanPoint:
    value: float
    seed: int
    report: MonteCarloReport | None = None
    error: str | None = None


def _with_axis(setup: MonteCarloSetup, axis: str, value: float, seed: int) -> MonteCarloSetup:
    pert = dataclasses.replace(setup.perturbation, rng_seed=seed)
    geom = setup.geometry
    if axis == "lateral_sigma":
        pert = dataclasses.replace(pert, lateral_sigma=value)
    elif axis == "angular_halfwidth":
        pert = dataclasses.replace(pert, angular_halfwidth=value)
    elif axis == "spacing_error":
        pert = dataclasses.replace(pert, axial_sigma=value)
    elif axis == "wavelength":
        geom = dataclasses.replace(geom, wavelength=value)
    else:
        raise ValueError(f"unknown scan axis {axis!r}; choose from {SCAN_AXES}")
    return dataclasses.replace(setup, geometry=geom, perturbation=pert)


def _is_monotone(values) -> bool:
    diffs = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(diffs >= 0) or np.all(diffs <= 0))


def scan_parameter(
    axis: str,
    values: Sequence[float],
    setup: MonteCarloSetup,
    workers: int | None = None,
    echo: dict[str, Any] | None = None,
) -> list[ScanPoint]:
    """One Monte Carlo run per value; point ``i`` uses seed ``base + i``.

    A failing point is recorded with its error message and the scan moves
    on. ``spacing_error`` is the per-emitter axial position jitter.
    """
    if axis not in SCAN_AXES:
        raise ValueError(f"unknown scan axis {axis!r}; choose from {SCAN_AXES}")
    if not values:
        raise ValueError("scan needs at least one value")
    if not _is_monotone(values):
        raise ValueError("scan values must be monotone")
    base = setup.perturbation.rng_seed
    points = []
    for i, value in enumerate(values):
        seed = (base + i) % 2**64
        try:
            point_setup = _with_axis(setup, axis, float(value), seed)
            point_echo = None
            if echo is not None:
                point_echo = echo | {"scan_point": {"axis": axis, "value": float(value), "seed": seed}}
            report = point_setup.run(workers=workers, config_echo=point_echo)
            points.append(ScanPoint(float(value), seed, report))
        except (DickeHeraldError, ValueError) as exc:
            log.warning("scan point %s=%g failed: %s", axis, value, exc)
            points.append(ScanPoint(float(value), seed, error=f"{type(exc).__name__}: {exc}"))
    return points
