"""Heralded symmetric Dicke states of remote emitters via far-field photodetection."""

from .analysis import (
    MonteCarloReport,
    MonteCarloSetup,
    ScanPoint,
    WitnessVerdict,
    first_order_fidelity,
    monte_carlo_fidelity,
    scan_parameter,
    witness_check,
)
from .detection import (
    DetectionEvent,
    Engine,
    Interpretation,
    ProtocolResult,
    amplitude_oracle_bruteforce,
    amplitude_via_permanents,
    apply_detection,
    permanent_state,
    run_protocol,
    ryser_permanent,
)
from .geometry import (
    ChainGeometry,
    DetectorSpec,
    Distribution,
    PerturbationSpec,
    dicke_detector_angles,
    dicke_detectors,
    nominal_phase,
    phase_matrix,
    sample_perturbed_phase_matrix,
)
from .state import (
    DickeTarget,
    EmissionModel,
    EmitterState,
    Level,
    Polarizer,
    fidelity,
    make_dicke_state,
    make_initial_state,
    normalize,
    total_spin_squared,
    total_spin_z,
)

__version__ = "0.1.0"
