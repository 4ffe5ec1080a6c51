"""Heading-alignment workbench.

Classical in-motion self-alignment methods (dual-vector and Wahba-type,
over integrated or instantaneous gravity observations), a from-scratch
neural heading estimator with five alignment-time variations, and a
deterministic moored-vessel simulator that stands in for sea recordings.
"""

from . import aligners, attitude, harness, nn, recording, simulate, strapdown
from .aligners import AlignMethod, HeadingEstimate, align_heading
from .errors import HeadAlignError
from .recording import Recording, read_recording, write_recording
from .simulate import (
    DEFAULT_SENSORS,
    NOISE_FREE,
    ScenarioConfig,
    SensorSpec,
    scenario_bank,
    simulate_recording,
)

__version__ = "0.1.0"

__all__ = [
    "AlignMethod",
    "HeadingEstimate",
    "align_heading",
    "HeadAlignError",
    "Recording",
    "read_recording",
    "write_recording",
    "ScenarioConfig",
    "SensorSpec",
    "DEFAULT_SENSORS",
    "NOISE_FREE",
    "scenario_bank",
    "simulate_recording",
    "attitude",
    "strapdown",
    "aligners",
    "simulate",
    "recording",
    "harness",
    "nn",
    "__version__",
]
