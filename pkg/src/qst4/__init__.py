"""Tomography of four-level quantum states from noisy intensity measurements."""

from .estimator import DensityMatrix4, FitOptions, FitResult, density_from_params, reconstruct
from .frames import Frame, FrameId, get_frame, mub_frame, vinzant_frame
from .metrics import concurrence, fidelity_pure, purity
from .runner import ExperimentConfig, SampleSpec, SweepRecord, run_sweep
from .states import PureState4, StateAngles, grid_sample, phase_entangled, phase_sample, state_from_angles

__all__ = [
    "DensityMatrix4",
    "ExperimentConfig",
    "FitOptions",
    "FitResult",
    "Frame",
    "FrameId",
    "PureState4",
    "SampleSpec",
    "StateAngles",
    "SweepRecord",
    "concurrence",
    "density_from_params",
    "fidelity_pure",
    "get_frame",
    "grid_sample",
    "mub_frame",
    "phase_entangled",
    "phase_sample",
    "purity",
    "reconstruct",
    "run_sweep",
    "state_from_angles",
    "vinzant_frame",
]
