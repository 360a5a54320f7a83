"""Mach-Zehnder interferometer with a superposed absorber.

Exact single-photon evolution, the competing absorber models, seeded Monte
Carlo and the binomial discrimination layer.
"""

from mzabsorber.errors import ConfigError
from mzabsorber.interferometer import (
    DeviceGeometry,
    JointState,
    Mode,
    PhotonState,
    apply_absorber,
    apply_beam_splitter,
    apply_mirrors,
    detection_probability,
    evolve_device,
    evolve_joint,
)
from mzabsorber.models import AnalyticResult, Method, Model, ScenarioConfig

__version__ = "0.1.0"

__all__ = [
    "AnalyticResult",
    "ConfigError",
    "DeviceGeometry",
    "JointState",
    "Method",
    "Mode",
    "Model",
    "PhotonState",
    "ScenarioConfig",
    "apply_absorber",
    "apply_beam_splitter",
    "apply_mirrors",
    "detection_probability",
    "evolve_device",
    "evolve_joint",
]
