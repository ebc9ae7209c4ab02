"""Cat Swarm Optimization (CSO, AICSO, PCSO, ICSO) y banco de pruebas F1-F23."""

from .config import SUITE_VERSION
from .objective_suite import lookup, evaluate
from .swarm_core import CsoParams, run
from .variants import AicsoParams, IcsoParams, PcsoParams, aicso_run, icso_run, pcso_run

__version__ = "1.0.0"

__all__ = [
    "SUITE_VERSION",
    "AicsoParams",
    "CsoParams",
    "IcsoParams",
    "PcsoParams",
    "aicso_run",
    "evaluate",
    "icso_run",
    "lookup",
    "pcso_run",
    "run",
]
