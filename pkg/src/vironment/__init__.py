"""Simulation of a wearable 12-sensor ultrasonic social-distancing ring.

Subsystems: clock-face geometry, single-sensor echo physics against a 2-D
scene, the multiplexed scan schedule, the PPI sector display, the alert
state machine, the device-to-display wire protocol, the monocular
distance estimator, and a deterministic session loop tying them together.
"""

from .geometry import PolarTarget, WearerPose, bearing_of, dodecant_of, to_egocentric
from .sonar import (
    Agent,
    NoiseModel,
    Scene,
    SonarSpec,
    apply_noise,
    distance_from_time,
    echo_time,
    first_echo,
    step_scene,
)
from .scanner import (
    SENTINEL_MM,
    MuxRoute,
    ScanFrame,
    ScanSchedule,
    next_slot,
    route,
    run_scan,
    scan_timing,
)
from .ppi import PpiFrame, PpiSector, build_ppi, color_of, render_svg
from .alert import AlertConfig, AlertState, step_alert
from .wire import FRAME_LEN, StreamDecoder, crc16, decode_stream, encode_frame
from .distancer import (
    Calibration,
    Detection,
    ScreenState,
    estimate_distance,
    project_scene,
    screen_state,
    step_distancer,
)
from .session import Command, SessionConfig, SessionResult, TelemetryRecord, run_session

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "AlertConfig",
    "AlertState",
    "Calibration",
    "Command",
    "Detection",
    "FRAME_LEN",
    "MuxRoute",
    "NoiseModel",
    "PolarTarget",
    "PpiFrame",
    "PpiSector",
    "Scene",
    "ScanFrame",
    "ScanSchedule",
    "ScreenState",
    "SENTINEL_MM",
    "SessionConfig",
    "SessionResult",
    "SonarSpec",
    "StreamDecoder",
    "TelemetryRecord",
    "WearerPose",
    "apply_noise",
    "bearing_of",
    "build_ppi",
    "color_of",
    "crc16",
    "decode_stream",
    "distance_from_time",
    "dodecant_of",
    "echo_time",
    "encode_frame",
    "estimate_distance",
    "first_echo",
    "next_slot",
    "project_scene",
    "render_svg",
    "route",
    "run_scan",
    "run_session",
    "scan_timing",
    "screen_state",
    "step_alert",
    "step_distancer",
    "step_scene",
    "to_egocentric",
    "__version__",
]
