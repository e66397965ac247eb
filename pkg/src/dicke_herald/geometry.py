"""Emitter chain, far-field detectors and the interferometric phase matrix.

Emitter ``j`` (1-based) sits at ``R_j = j * d * u`` on the chain axis ``u``.
Detectors lie in the plane spanned by ``u`` and the in-plane transverse axis
``x``; detector ``n`` looks along ``e_n = sin(theta_n) u + cos(theta_n) x``.
The phase picked up on the path emitter ``j`` -> detector ``n`` is
``k * (e_n . R_j)``, i.e. only the projection onto the detector direction
matters and the detector distance never enters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GeometryInfeasibleError, InvalidSizeError, ModeMismatchError
from .state import Polarizer

TWO_PI = 2 * math.pi


class Distribution(str, enum.Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class ChainGeometry:
    num_emitters: int
    spacing: float  # meters
    wavelength: float = 500e-9  # meters
    far_field: bool = True

    def __post_init__(self):
        if self.num_emitters < 1:
            raise InvalidSizeError("num_emitters must be positive")
        if not (self.spacing > 0 and self.wavelength > 0):
            raise ValueError("spacing and wavelength must be positive")

    @property
    def wavenumber(self) -> float:
        return TWO_PI / self.wavelength

    @property
    def axial_positions(self) -> np.ndarray:
        """Nominal coordinates ``j * d`` along the chain axis, j = 1..N."""
        return np.arange(1, self.num_emitters + 1) * self.spacing


@dataclass(frozen=True)
class DetectorSpec:
    """One detector: viewing angle or, for the fiber variant, a fixed phase."""

    angle: float = 0.0
    polarizer: Polarizer = Polarizer.SIGMA_PLUS
    exact_phase: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "polarizer", Polarizer(self.polarizer))
        if not abs(self.angle) < math.pi / 2:
            raise ValueError(f"|angle| must be below pi/2, got {self.angle}")

    @property
    def phase_mode(self) -> str:
        return "from_angle" if self.exact_phase is None else "exact_phase"


@dataclass(frozen=True)
class PerturbationSpec:
    """Random geometric imperfections.

    ``lateral_sigma`` and ``axial_sigma`` are standard deviations of the
    emitter displacement (a uniform kind uses half-width ``sqrt(3) * sigma``
    so the spread matches). ``angular_halfwidth`` is the half-width of the
    detector angle window for the uniform kind and the standard deviation
    for the gaussian kind.
    """

    lateral_sigma: float = 0.0
    axial_sigma: float = 0.0
    angular_halfwidth: float = 0.0
    lateral_kind: Distribution = Distribution.GAUSSIAN
    axial_kind: Distribution = Distribution.GAUSSIAN
    angular_kind: Distribution = Distribution.UNIFORM
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("lateral_sigma", "axial_sigma", "angular_halfwidth"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("lateral_kind", "axial_kind", "angular_kind"):
            object.__setattr__(self, name, Distribution(getattr(self, name)))
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be an unsigned 64-bit integer")


def nominal_phase(geom: ChainGeometry, det: DetectorSpec) -> float:
    """Adjacent-emitter phase difference ``k d sin(theta)`` seen by ``det``."""
    if det.phase_mode != "from_angle":
        raise ModeMismatchError("detector carries an exact phase, not an angle")
    return geom.wavenumber * geom.spacing * math.sin(det.angle)


def _diffraction_orders():
    yield 0
    q = 1
    while True:
        yield q
        yield -q
        q += 1


def dicke_detector_angles(geom: ChainGeometry, n_detectors: int) -> list[float]:
    """Distinct angles with ``k d sin(theta) = 2 pi q``, smallest ``|q|`` first."""
    ratio = geom.wavelength / geom.spacing
    q_max = math.ceil(1 / ratio)
    angles = []
    for q in _diffraction_orders():
        if abs(q) > q_max or len(angles) == n_detectors:
            break
        s = q * ratio
        if abs(s) < 1:
            angles.append(math.asin(s))
    if len(angles) < n_detectors:
        raise GeometryInfeasibleError(
            f"only {len(angles)} admissible orders for d/lambda = {1 / ratio:g}, "
            f"need {n_detectors}"
        )
    return angles


def dicke_detectors(geom: ChainGeometry, polarizers: Sequence[Polarizer | str]) -> list[DetectorSpec]:
    angles = dicke_detector_angles(geom, len(polarizers))
    return [DetectorSpec(angle=a, polarizer=p) for a, p in zip(angles, polarizers)]


def _far_field(k, angles, axial, lateral):
    # k * (e_n . R_j) with e_n = (sin, cos) in the (u, x) plane
    return k * (np.outer(np.sin(angles), axial) + np.outer(np.cos(angles), lateral))


def _assemble(geom, detectors, angles, axial, lateral):
    angular = _far_field(geom.wavenumber, angles, axial, lateral)
    j = np.arange(1, geom.num_emitters + 1)
    for n, det in enumerate(detectors):
        if det.exact_phase is not None:
            angular[n] = j * det.exact_phase
    return angular


def phase_matrix(geom: ChainGeometry, detectors: Sequence[DetectorSpec]) -> np.ndarray:
    """Path phases ``phi[n, j-1]`` for detector ``n`` and emitter ``j``."""
    if not detectors:
        raise ValueError("need at least one detector")
    angles = np.array([d.angle for d in detectors], dtype=float)
    return _assemble(geom, detectors, angles, geom.axial_positions, np.zeros(geom.num_emitters))


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for ``(seed, index)``, stable across runs and workers."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _draw(rng, kind, scale, size, std_scale):
    if kind is Distribution.GAUSSIAN:
        return rng.normal(0.0, scale, size)
    half = scale * (math.sqrt(3) if std_scale else 1.0)
    return rng.uniform(-half, half, size)


def sample_perturbed_phase_matrix(
    geom: ChainGeometry,
    detectors: Sequence[DetectorSpec],
    pert: PerturbationSpec,
    sample_index: int,
) -> np.ndarray:
    """Phase matrix of one randomly perturbed realisation.

    Draw order is fixed (lateral, axial, angular) and independent of which
    widths are zero, so a given ``(seed, sample_index)`` always maps to the
    same configuration. Exact-phase (fiber) rows are left untouched.
    """
    n_em = geom.num_emitters
    rng = sample_rng(pert.rng_seed, sample_index)
    lateral = _draw(rng, pert.lateral_kind, pert.lateral_sigma, n_em, True)
    axial = _draw(rng, pert.axial_kind, pert.axial_sigma, n_em, True)
    dtheta = _draw(rng, pert.angular_kind, pert.angular_halfwidth, len(detectors), False)
    angles = np.array([d.angle for d in detectors], dtype=float) + dtheta
    return _assemble(geom, detectors, angles, geom.axial_positions + axial, lateral)


def phase_jacobian(geom: ChainGeometry, detectors: Sequence[DetectorSpec]) -> np.ndarray:
    """Linear response of the phase matrix to the perturbation variables.

    Shape ``(n_det * N, 2 N + n_det)``: maps the stacked variables
    ``(lateral_1..N, axial_1..N, dtheta_1..n_det)`` onto the row-major
    flattened phase matrix, evaluated at the nominal configuration.
    """
    k = geom.wavenumber
    n_em, n_det = geom.num_emitters, len(detectors)
    z = geom.axial_positions
    B = np.zeros((n_det * n_em, 2 * n_em + n_det))
    for n, det in enumerate(detectors):
        if det.exact_phase is not None:
            continue
        s, c = math.sin(det.angle), math.cos(det.angle)
        for j in range(n_em):
            row = n * n_em + j
            B[row, j] = k * c
            B[row, n_em + j] = k * s
            B[row, 2 * n_em + n] = k * (c * z[j])
    return B


def perturbation_variances(pert: PerturbationSpec, n_em: int, n_det: int) -> np.ndarray:
    """Variances of the stacked perturbation variables used by :func:`phase_jacobian`."""

    def var(kind, scale, std_scale):
        if kind is Distribution.GAUSSIAN or std_scale:
            return scale**2
        return scale**2 / 3

    return np.concatenate([
        np.full(n_em, var(pert.lateral_kind, pert.lateral_sigma, True)),
        np.full(n_em, var(pert.axial_kind, pert.axial_sigma, True)),
        np.full(n_det, var(pert.angular_kind, pert.angular_halfwidth, False)),
    ])


def wrapped_distance(phases, period: float = TWO_PI) -> np.ndarray:
    """Distance of each phase to the nearest multiple of ``period``."""
    phases = np.asarray(phases, dtype=float)
    return np.abs(phases - period * np.round(phases / period))
