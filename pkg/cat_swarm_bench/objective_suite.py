"""
Suite clásica de 23 funciones de prueba (F1-F23).

F1-F7 unimodales, F8-F13 multimodales de dimensión configurable y
F14-F23 multimodales de dimensión fija. Cada evaluador opera sobre el
último eje, así que acepta un punto (D,) o un lote (n, D).
"""

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from .errors import ConfigurationError, UnknownFunctionError, UsageError

DEFAULT_DIM = 30
SCHWEFEL_PER_DIM = -418.9829


class Family(str, Enum):
    UNIMODAL = "Unimodal"
    MULTIMODAL = "Multimodal"
    FIXED_DIM_MULTIMODAL = "FixedDimMultimodal"


# -----------------------------
# Funciones unimodales
# -----------------------------

def sphere(x):
    return np.sum(x ** 2, axis=-1)


def schwefel_2_22(x):
    ax = np.abs(x)
    return np.sum(ax, axis=-1) + np.prod(ax, axis=-1)


def schwefel_1_2(x):
    return np.sum(np.cumsum(x, axis=-1) ** 2, axis=-1)


def schwefel_2_21(x):
    return np.max(np.abs(x), axis=-1)


def rosenbrock(x):
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (tail - head ** 2) ** 2 + (head - 1.0) ** 2, axis=-1)


def step(x):
    return np.sum(np.floor(x + 0.5) ** 2, axis=-1)


def quartic(x):
    """Sin el término de ruido; el ruido lo suma `Objective`."""
    i = np.arange(1, x.shape[-1] + 1)
    return np.sum(i * x ** 4, axis=-1)


# -----------------------------
# Funciones multimodales (D configurable)
# -----------------------------

def schwefel_2_26(x):
    return np.sum(-x * np.sin(np.sqrt(np.abs(x))), axis=-1)


def rastrigin(x):
    return np.sum(x ** 2 - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=-1)


def ackley(x):
    d = x.shape[-1]
    return (
        -20.0 * np.exp(-0.2 * np.sqrt(np.sum(x ** 2, axis=-1) / d))
        - np.exp(np.sum(np.cos(2.0 * np.pi * x), axis=-1) / d)
        + 20.0
        + math.e
    )


def griewank(x):
    i = np.arange(1, x.shape[-1] + 1)
    return np.sum(x ** 2, axis=-1) / 4000.0 - np.prod(np.cos(x / np.sqrt(i)), axis=-1) + 1.0


def _penalty(x, a, k, m):
    return np.sum(
        np.where(x > a, k * (x - a) ** m, 0.0) + np.where(x < -a, k * (-x - a) ** m, 0.0),
        axis=-1,
    )


def penalized_1(x):
    d = x.shape[-1]
    y = 1.0 + (x + 1.0) / 4.0
    core = (
        10.0 * np.sin(np.pi * y[..., 0]) ** 2
        + np.sum((y[..., :-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * y[..., 1:]) ** 2), axis=-1)
        + (y[..., -1] - 1.0) ** 2
    )
    return np.pi / d * core + _penalty(x, 10.0, 100.0, 4)


def penalized_2(x):
    core = (
        np.sin(3.0 * np.pi * x[..., 0]) ** 2
        + np.sum((x[..., :-1] - 1.0) ** 2 * (1.0 + np.sin(3.0 * np.pi * x[..., 1:]) ** 2), axis=-1)
        + (x[..., -1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * x[..., -1]) ** 2)
    )
    return 0.1 * core + _penalty(x, 5.0, 100.0, 4)


# -----------------------------
# Funciones de dimensión fija
# -----------------------------

_FOXHOLE_GRID = np.array([-32.0, -16.0, 0.0, 16.0, 32.0])
_FOXHOLE_A = np.vstack([np.tile(_FOXHOLE_GRID, 5), np.repeat(_FOXHOLE_GRID, 5)])


def shekel_foxholes(x):
    diff = x[..., :, None] - _FOXHOLE_A
    j = np.arange(1, 26)
    inner = np.sum(1.0 / (j + np.sum(diff ** 6, axis=-2)), axis=-1)
    return 1.0 / (1.0 / 500.0 + inner)


_KOWALIK_A = np.array([0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627,
                       0.0456, 0.0342, 0.0323, 0.0235, 0.0246])
_KOWALIK_B = 1.0 / np.array([0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0])


def kowalik(x):
    b = _KOWALIK_B
    x1, x2, x3, x4 = (x[..., k, None] for k in range(4))
    with np.errstate(divide="ignore", invalid="ignore"):
        model = x1 * (b ** 2 + b * x2) / (b ** 2 + b * x3 + x4)
    return np.sum((_KOWALIK_A - model) ** 2, axis=-1)


def six_hump_camel(x):
    x1, x2 = x[..., 0], x[..., 1]
    return (
        4.0 * x1 ** 2 - 2.1 * x1 ** 4 + x1 ** 6 / 3.0
        + x1 * x2 - 4.0 * x2 ** 2 + 4.0 * x2 ** 4
    )


def branin(x):
    x1, x2 = x[..., 0], x[..., 1]
    return (
        (x2 - 5.1 / (4.0 * np.pi ** 2) * x1 ** 2 + 5.0 / np.pi * x1 - 6.0) ** 2
        + 10.0 * (1.0 - 1.0 / (8.0 * np.pi)) * np.cos(x1)
        + 10.0
    )


def goldstein_price(x):
    x1, x2 = x[..., 0], x[..., 1]
    left = 1.0 + (x1 + x2 + 1.0) ** 2 * (
        19.0 - 14.0 * x1 + 3.0 * x1 ** 2 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 ** 2
    )
    right = 30.0 + (2.0 * x1 - 3.0 * x2) ** 2 * (
        18.0 - 32.0 * x1 + 12.0 * x1 ** 2 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 ** 2
    )
    return left * right


_HARTMANN_C = np.array([1.0, 1.2, 3.0, 3.2])
_HARTMANN3_A = np.array([[3.0, 10.0, 30.0],
                         [0.1, 10.0, 35.0],
                         [3.0, 10.0, 30.0],
                         [0.1, 10.0, 35.0]])
_HARTMANN3_P = 1e-4 * np.array([[3689, 1170, 2673],
                                [4699, 4387, 7470],
                                [1091, 8732, 5547],
                                [381, 5743, 8828]])
_HARTMANN6_A = np.array([[10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
                         [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
                         [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
                         [17.0, 8.0, 0.05, 10.0, 0.1, 14.0]])
_HARTMANN6_P = 1e-4 * np.array([[1312, 1696, 5569, 124, 8283, 5886],
                                [2329, 4135, 8307, 3736, 1004, 9991],
                                [2348, 1451, 3522, 2883, 3047, 6650],
                                [4047, 8828, 8732, 5743, 1091, 381]])


def _hartmann(x, a, p):
    inner = np.sum(a * (x[..., None, :] - p) ** 2, axis=-1)
    return -np.sum(_HARTMANN_C * np.exp(-inner), axis=-1)


def hartmann_3(x):
    return _hartmann(x, _HARTMANN3_A, _HARTMANN3_P)


def hartmann_6(x):
    return _hartmann(x, _HARTMANN6_A, _HARTMANN6_P)


_SHEKEL_A = np.array([[4.0, 4.0, 4.0, 4.0],
                      [1.0, 1.0, 1.0, 1.0],
                      [8.0, 8.0, 8.0, 8.0],
                      [6.0, 6.0, 6.0, 6.0],
                      [3.0, 7.0, 3.0, 7.0],
                      [2.0, 9.0, 2.0, 9.0],
                      [5.0, 5.0, 3.0, 3.0],
                      [8.0, 1.0, 8.0, 1.0],
                      [6.0, 2.0, 6.0, 2.0],
                      [7.0, 3.6, 7.0, 3.6]])
_SHEKEL_C = 0.1 * np.array([1.0, 2.0, 2.0, 4.0, 4.0, 6.0, 3.0, 7.0, 5.0, 5.0])


def _shekel(m):
    def shekel(x):
        sq = np.sum((x[..., None, :] - _SHEKEL_A[:m]) ** 2, axis=-1)
        return -np.sum(1.0 / (sq + _SHEKEL_C[:m]), axis=-1)

    shekel.__name__ = f"shekel_{m}"
    return shekel


# -----------------------------
# Registro
# -----------------------------

@dataclass(frozen=True)
class SuiteEntry:
    """
    Metadatos de una función del registro.

    `f_min` es el valor impreso en la tabla de referencia; `optimum` es el
    mínimo conocido con más precisión (difieren donde la tabla redondea,
    p. ej. F14 imprime 1 y el mínimo es 0.998004).
    """

    id: str
    name: str
    family: Family
    default_dim: int
    lower: float
    upper: Union[float, Sequence[float]]
    func: Callable
    table_f_min: Optional[float]
    optimum_value: Optional[float] = None
    argmin_point: Optional[Sequence[float]] = None
    argmin_fill: Optional[float] = None
    noisy: bool = False
    min_dim: int = 1
    lower_per_dim: Optional[Sequence[float]] = None

    @property
    def fixed_dim(self) -> bool:
        return self.family is Family.FIXED_DIM_MULTIMODAL

    @property
    def f_min(self) -> float:
        return self.f_min_for(self.default_dim)

    def f_min_for(self, dim: int) -> float:
        if self.table_f_min is None:
            # F8: la tabla imprime "-418.9829 x D"
            return SCHWEFEL_PER_DIM * dim
        return self.table_f_min

    def optimum_for(self, dim: int) -> float:
        if self.optimum_value is None:
            return self.f_min_for(dim)
        return self.optimum_value

    def argmin(self, dim: Optional[int] = None) -> Optional[np.ndarray]:
        dim = self.resolve_dim(dim)
        if self.argmin_point is not None:
            return np.array(self.argmin_point, dtype=float)
        if self.argmin_fill is not None:
            return np.full(dim, self.argmin_fill, dtype=float)
        return None

    def resolve_dim(self, dim: Optional[int] = None) -> int:
        if dim is None:
            return self.default_dim
        if self.fixed_dim and dim != self.default_dim:
            raise UsageError(
                f"{self.id} tiene dimensión fija {self.default_dim}, recibido {dim}"
            )
        if dim < self.min_dim:
            raise UsageError(f"{self.id} requiere al menos {self.min_dim} dimensiones, recibido {dim}")
        return dim

    def bounds(self, dim: Optional[int] = None):
        dim = self.resolve_dim(dim)
        lower = np.broadcast_to(
            np.asarray(self.lower_per_dim if self.lower_per_dim is not None else self.lower, dtype=float),
            (dim,),
        ).copy()
        upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (dim,)).copy()
        return lower, upper

    def objective(self, dim: Optional[int] = None) -> "Objective":
        dim = self.resolve_dim(dim)
        lower, upper = self.bounds(dim)
        return Objective(
            name=self.id,
            dim=dim,
            lower=lower,
            upper=upper,
            f_min=self.f_min_for(dim),
            func=self.func,
            noisy=self.noisy,
        )


@dataclass
class Objective:
    """Función instanciada con dimensión y caja de búsqueda concretas."""

    name: str
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    f_min: float
    func: Callable
    noisy: bool = False

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != (self.dim,) or self.upper.shape != (self.dim,):
            raise ConfigurationError(f"{self.name}: límites con forma distinta a ({self.dim},)")
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ConfigurationError(f"{self.name}: los límites deben ser finitos")
        if np.any(self.lower > self.upper):
            raise ConfigurationError(f"{self.name}: límite inferior mayor que el superior")

    def evaluate(self, x, rng: Optional[np.random.Generator] = None) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise UsageError(f"{self.name}: se esperaba un vector de {self.dim} dimensiones, recibido {x.shape}")
        value = float(self.func(x))
        if self.noisy and rng is not None:
            value += float(rng.random())
        return value

    def evaluate_many(self, xs, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.ndim != 2 or xs.shape[1] != self.dim:
            raise UsageError(f"{self.name}: se esperaba un lote (n, {self.dim}), recibido {xs.shape}")
        values = np.asarray(self.func(xs), dtype=float)
        if self.noisy and rng is not None:
            values = values + rng.random(xs.shape[0])
        return values


_ENTRIES: List[SuiteEntry] = [
    SuiteEntry("F1", "Sphere", Family.UNIMODAL, DEFAULT_DIM, -100.0, 100.0, sphere, 0.0, argmin_fill=0.0),
    SuiteEntry("F2", "Schwefel 2.22", Family.UNIMODAL, DEFAULT_DIM, -10.0, 10.0, schwefel_2_22, 0.0, argmin_fill=0.0),
    SuiteEntry("F3", "Schwefel 1.2", Family.UNIMODAL, DEFAULT_DIM, -100.0, 100.0, schwefel_1_2, 0.0, argmin_fill=0.0),
    SuiteEntry("F4", "Schwefel 2.21", Family.UNIMODAL, DEFAULT_DIM, -100.0, 100.0, schwefel_2_21, 0.0, argmin_fill=0.0),
    SuiteEntry("F5", "Rosenbrock", Family.UNIMODAL, DEFAULT_DIM, -30.0, 30.0, rosenbrock, 0.0,
               argmin_fill=1.0, min_dim=2),
    SuiteEntry("F6", "Step", Family.UNIMODAL, DEFAULT_DIM, -100.0, 100.0, step, 0.0, argmin_fill=0.0),
    SuiteEntry("F7", "Quartic with noise", Family.UNIMODAL, DEFAULT_DIM, -1.28, 1.28, quartic, 0.0,
               argmin_fill=0.0, noisy=True),
    SuiteEntry("F8", "Schwefel 2.26", Family.MULTIMODAL, DEFAULT_DIM, -500.0, 500.0, schwefel_2_26, None,
               argmin_fill=420.9687),
    SuiteEntry("F9", "Rastrigin", Family.MULTIMODAL, DEFAULT_DIM, -5.12, 5.12, rastrigin, 0.0, argmin_fill=0.0),
    SuiteEntry("F10", "Ackley", Family.MULTIMODAL, DEFAULT_DIM, -32.0, 32.0, ackley, 0.0, argmin_fill=0.0),
    SuiteEntry("F11", "Griewank", Family.MULTIMODAL, DEFAULT_DIM, -600.0, 600.0, griewank, 0.0, argmin_fill=0.0),
    SuiteEntry("F12", "Penalized 1", Family.MULTIMODAL, DEFAULT_DIM, -50.0, 50.0, penalized_1, 0.0,
               argmin_fill=-1.0),
    SuiteEntry("F13", "Penalized 2", Family.MULTIMODAL, DEFAULT_DIM, -50.0, 50.0, penalized_2, 0.0,
               argmin_fill=1.0),
    SuiteEntry("F14", "Shekel's Foxholes", Family.FIXED_DIM_MULTIMODAL, 2, -65.536, 65.536, shekel_foxholes, 1.0,
               optimum_value=0.998003838, argmin_point=(-31.97833, -31.97833)),
    SuiteEntry("F15", "Kowalik", Family.FIXED_DIM_MULTIMODAL, 4, -5.0, 5.0, kowalik, 0.00030,
               optimum_value=0.000307486, argmin_point=(0.1928, 0.1908, 0.1231, 0.1358)),
    SuiteEntry("F16", "Six-Hump Camel", Family.FIXED_DIM_MULTIMODAL, 2, -5.0, 5.0, six_hump_camel, -1.0316,
               optimum_value=-1.0316285, argmin_point=(0.08983, -0.7126)),
    SuiteEntry("F17", "Branin", Family.FIXED_DIM_MULTIMODAL, 2, -5.0, (10.0, 15.0), branin, 0.398,
               optimum_value=0.397887, argmin_point=(math.pi, 2.275), lower_per_dim=(-5.0, 0.0)),
    SuiteEntry("F18", "Goldstein-Price", Family.FIXED_DIM_MULTIMODAL, 2, -2.0, 2.0, goldstein_price, 3.0,
               optimum_value=3.0, argmin_point=(0.0, -1.0)),
    SuiteEntry("F19", "Hartmann 3", Family.FIXED_DIM_MULTIMODAL, 3, 0.0, 1.0, hartmann_3, -3.86,
               optimum_value=-3.86278, argmin_point=(0.114614, 0.555649, 0.852547)),
    SuiteEntry("F20", "Hartmann 6", Family.FIXED_DIM_MULTIMODAL, 6, 0.0, 1.0, hartmann_6, -3.32,
               optimum_value=-3.32237,
               argmin_point=(0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573)),
    SuiteEntry("F21", "Shekel m=5", Family.FIXED_DIM_MULTIMODAL, 4, 0.0, 10.0, _shekel(5), -10.1532,
               optimum_value=-10.1532, argmin_point=(4.0, 4.0, 4.0, 4.0)),
    SuiteEntry("F22", "Shekel m=7", Family.FIXED_DIM_MULTIMODAL, 4, 0.0, 10.0, _shekel(7), -10.4028,
               optimum_value=-10.4028, argmin_point=(4.0, 4.0, 4.0, 4.0)),
    SuiteEntry("F23", "Shekel m=10", Family.FIXED_DIM_MULTIMODAL, 4, 0.0, 10.0, _shekel(10), -10.5363,
               optimum_value=-10.5363, argmin_point=(4.0, 4.0, 4.0, 4.0)),
]

REGISTRY: Dict[str, SuiteEntry] = {entry.id: entry for entry in _ENTRIES}
FUNCTION_IDS: List[str] = [entry.id for entry in _ENTRIES]


def lookup(function_id: str) -> SuiteEntry:
    key = str(function_id).strip().upper()
    try:
        return REGISTRY[key]
    except KeyError:
        raise UnknownFunctionError(str(function_id))


def evaluate(entry: SuiteEntry, x, rng: Optional[np.random.Generator] = None) -> float:
    """
    Evalúa una función del registro en un punto.

    Args:
        entry: Entrada del registro
        x: Posición; su longitud fija la dimensión en las funciones escalables
        rng: Fuente aleatoria para el ruido de F7 (sin ella el ruido es 0)

    Returns:
        float: Valor de la función

    Raises:
        UsageError: Si la dimensión no es válida para la entrada.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise UsageError(f"{entry.id}: se esperaba un vector, recibido forma {x.shape}")
    dim = entry.resolve_dim(x.shape[0])
    return entry.objective(dim).evaluate(x, rng=rng)


def parse_function_list(text: str) -> List[str]:
    """
    Interpreta listas de funciones: "F1-F7", "F1..F23", "F1,F9,F14", "all".
    """
    text = (text or "").strip()
    if not text or text.lower() == "all":
        return list(FUNCTION_IDS)

    ids: List[str] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        sep = ".." if ".." in chunk else ("-" if "-" in chunk else None)
        if sep:
            start, end = (part.strip() for part in chunk.split(sep, 1))
            first = FUNCTION_IDS.index(lookup(start).id)
            last = FUNCTION_IDS.index(lookup(end).id)
            if first > last:
                raise UsageError(f"Rango de funciones invertido: '{chunk}'")
            ids.extend(FUNCTION_IDS[first:last + 1])
        else:
            ids.append(lookup(chunk).id)

    seen = set()
    return [fid for fid in ids if not (fid in seen or seen.add(fid))]


def _format_bound(values: np.ndarray) -> str:
    unique = np.unique(values)
    shown = unique if unique.size == 1 else values
    return ";".join(repr(float(v)) for v in shown)


def registry_csv() -> str:
    """Volcado del registro (id, family, dim, lower, upper, f_min) en CSV."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["id", "name", "family", "dim", "lower", "upper", "f_min"])
    for entry in _ENTRIES:
        lower, upper = entry.bounds()
        writer.writerow([
            entry.id,
            entry.name,
            entry.family.value,
            entry.default_dim,
            _format_bound(lower),
            _format_bound(upper),
            repr(float(entry.f_min)),
        ])
    return buffer.getvalue()
