"""
Excepciones del paquete.

Todas heredan de CatSwarmError para que la CLI y la API puedan
traducirlas a códigos de salida / respuestas HTTP en un solo lugar.
"""

from typing import Optional, Sequence


class CatSwarmError(Exception):
    """Error base de cat_swarm_bench."""


class ConfigurationError(CatSwarmError):
    """Parámetros o límites inválidos (p. ej. límites no finitos)."""


class UsageError(CatSwarmError):
    """Llamada con argumentos incompatibles con el contrato de la operación."""


class UnknownFunctionError(UsageError, KeyError):
    """Identificador de función que no existe en el registro."""

    def __init__(self, function_id: str):
        self.function_id = function_id
        super().__init__(f"Función desconocida: '{function_id}' (válidas: F1..F23)")

    def __str__(self) -> str:
        return self.args[0]


class NonFiniteFitnessError(CatSwarmError):
    """El objetivo devolvió NaN/inf; la corrida se aborta."""

    def __init__(self, function_id: str, position: Sequence[float], value: float):
        self.function_id = function_id
        self.position = [float(v) for v in position]
        self.value = value
        preview = ", ".join(f"{v:.6g}" for v in self.position[:8])
        if len(self.position) > 8:
            preview += ", ..."
        super().__init__(
            f"Fitness no finito ({value}) en {function_id} para la posición [{preview}]"
        )


class ResultsParseError(CatSwarmError):
    """Archivo de resultados mal formado o truncado."""

    def __init__(
        self,
        message: str,
        record_index: Optional[int] = None,
        field: Optional[str] = None,
        line_number: Optional[int] = None,
    ):
        self.record_index = record_index
        self.field = field
        self.line_number = line_number
        where = []
        if record_index is not None:
            where.append(f"registro {record_index}")
        if field:
            where.append(f"campo '{field}'")
        if line_number is not None:
            where.append(f"línea {line_number}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")
