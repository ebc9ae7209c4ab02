"""
Configuración del paquete.

- Variables de entorno (.env) leídas con python-dotenv.
- Valores por defecto de CSO y del protocolo experimental.
- Lectura de archivos de configuración `clave = valor` para la CLI.
"""

import logging
import os
import sys
from pathlib import Path
from typing import Dict, Optional

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, Field

from .errors import UsageError

load_dotenv()

SUITE_VERSION = "1"
RESULTS_FORMAT_VERSION = "1"
SEED_DERIVATION_VERSION = "1"

# Parámetros por defecto (el protocolo fija N=30 y 500 iteraciones; el resto
# no viene publicado y queda fijado aquí).
DEFAULTS: Dict[str, object] = {
    "n_cats": 30,
    "max_iters": 500,
    "smp": 5,
    # con srd=1 la mutación x*(1 ± r) contrae cada coordenada hacia 0
    # (E[log u] = log 2 - 1 con u ~ U(0, 2))
    "srd": 1.0,
    "cdc": 0.8,
    "spc": True,
    "mr": 0.3,
    "c1": 2.0,
    # con w=1 la velocidad de rastreo nunca decae: v_max acota el salto de
    # cada paso de rastreo durante toda la corrida
    "v_max_factor": 1e-6,
    "w_start": 0.9,
    "w_end": 0.4,
    "n_groups": 4,
    "ech": 20,
    "n_runs": 30,
    "master_seed": 42,
}


class Settings(BaseModel):
    """Valores tomados del entorno al momento de la llamada."""

    workers: int = Field(default=1, ge=1)
    log_level: str = "INFO"
    results_dir: Path = Path("./results")


def get_settings() -> Settings:
    raw_workers = os.getenv("CSO_WORKERS", "1")
    try:
        workers = int(raw_workers)
    except ValueError:
        raise UsageError(f"CSO_WORKERS debe ser entero, recibido '{raw_workers}'")
    return Settings(
        workers=max(1, workers),
        log_level=os.getenv("CSO_LOG_LEVEL", "INFO").upper(),
        results_dir=Path(os.getenv("CSO_RESULTS_DIR", "./results")),
    )


def configure_logging(level: Optional[str] = None) -> None:
    """Logs a stderr; stdout queda libre para la salida de los comandos."""
    level = (level or get_settings().log_level).upper()
    root = logging.getLogger("cat_swarm_bench")
    handler = next((h for h in root.handlers if getattr(h, "_cat_swarm", False)), None)
    if handler is None:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        handler._cat_swarm = True
        root.addHandler(handler)
    else:
        # el stderr anterior puede estar cerrado (setStream lo vaciaría)
        handler.stream = sys.stderr
    root.setLevel(getattr(logging, level, logging.INFO))


def load_config_file(path: str, allowed_keys) -> Dict[str, str]:
    """
    Lee un archivo `clave = valor` con comentarios `#`.

    Args:
        path: Ruta del archivo
        allowed_keys: Claves aceptadas (mismos nombres que los flags, con '_' o '-')

    Returns:
        Dict clave -> valor (texto); las claves se normalizan a '_'.

    Raises:
        UsageError: Si el archivo no existe o contiene claves desconocidas.
    """
    file_path = Path(path)
    if not file_path.is_file():
        raise UsageError(f"Archivo de configuración no encontrado: {path}")

    values = dotenv_values(file_path)
    allowed = set(allowed_keys)
    result: Dict[str, str] = {}
    for key, value in values.items():
        normalized = key.strip().lstrip("-").replace("-", "_")
        if normalized not in allowed:
            raise UsageError(f"Clave desconocida en {path}: '{key}'")
        if value is None:
            raise UsageError(f"Clave sin valor en {path}: '{key}'")
        result[normalized] = value.strip()
    return result
