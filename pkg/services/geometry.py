"""
================================================================================
                    CONJUNTOS FACTIBLES Y ORACULOS LINEALES
================================================================================
"""

import logging
import math
from abc import ABC, abstractmethod
from typing import Optional, Sequence, Union

import numpy as np

from config import get_settings
from errors import ContractViolation


logger = logging.getLogger(__name__)

ArrayLike = Union[Sequence[float], np.ndarray]


def as_vector(values: ArrayLike, dimension: Optional[int] = None, name: str = "vector") -> np.ndarray:
    """Convierte a vector float64 finito, validando la dimension si se indica"""
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1:
        raise ContractViolation(f"{name} debe ser un vector 1-D, tiene forma {vector.shape}")
    if dimension is not None and vector.shape[0] != dimension:
        raise ContractViolation(
            f"{name} tiene dimension {vector.shape[0]}, se esperaba {dimension}"
        )
    if not np.all(np.isfinite(vector)):
        raise ContractViolation(f"{name} contiene valores no finitos")
    return vector


def _frozen(values: np.ndarray) -> np.ndarray:
    frozen = np.array(values, dtype=np.float64, copy=True)
    frozen.setflags(write=False)
    return frozen


class FeasibleSet(ABC):
    """
    Conjunto de decision K con oraculo de minimizacion lineal.

    Los conjuntos son inmutables despues de construirse; todas las
    operaciones son funciones puras.
    """

    kind: str = "set"

    def __init__(self, dimension: int):
        if dimension < 1:
            raise ContractViolation(f"dimension debe ser positiva, recibido {dimension}")
        self._dimension = int(dimension)

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    @abstractmethod
    def diameter(self) -> float:
        """Diametro D en norma euclidiana"""

    @property
    @abstractmethod
    def strong_convexity(self) -> float:
        """Modulo beta_K; 0 indica un conjunto general"""

    def lmo(self, g: ArrayLike) -> np.ndarray:
        """Retorna un minimizador de <g, x> sobre el conjunto"""
        return self._lmo(as_vector(g, self._dimension, "g"))

    def project(self, x: ArrayLike) -> np.ndarray:
        """Proyeccion euclidiana sobre el conjunto"""
        return self._project(as_vector(x, self._dimension, "x"))

    def contains(self, x: ArrayLike, tol: Optional[float] = None) -> bool:
        """Prueba de pertenencia con tolerancia aditiva en cada restriccion"""
        if tol is None:
            tol = get_settings().membership_tol
        if tol < 0:
            raise ContractViolation(f"tol debe ser >= 0, recibido {tol}")
        return self._contains(as_vector(x, self._dimension, "x"), tol)

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        """Muestras uniformes del conjunto, forma (size, dimension)"""

    def initial_point(self) -> np.ndarray:
        """y_1 por defecto: el LMO del gradiente cero"""
        return self._lmo(np.zeros(self._dimension))

    @abstractmethod
    def _lmo(self, g: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _project(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _contains(self, x: np.ndarray, tol: float) -> bool:
        ...

    def describe(self) -> str:
        return f"{self.kind}(n={self._dimension}, D={self.diameter:.6g}, beta_K={self.strong_convexity:.6g})"


class L2Ball(FeasibleSet):
    """Bola euclidiana {x : ||x - center|| <= radius}"""

    kind = "l2ball"

    def __init__(self, center: ArrayLike, radius: float):
        center = as_vector(center, name="center")
        super().__init__(center.shape[0])
        if not radius > 0:
            raise ContractViolation(f"radius debe ser positivo, recibido {radius}")
        self.center = _frozen(center)
        self.radius = float(radius)

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def strong_convexity(self) -> float:
        return 1.0 / self.radius

    def _lmo(self, g: np.ndarray) -> np.ndarray:
        norm = np.linalg.norm(g)
        if norm == 0.0:
            return self.center.copy()
        return self.center - self.radius * g / norm

    def _project(self, x: np.ndarray) -> np.ndarray:
        offset = x - self.center
        norm = np.linalg.norm(offset)
        if norm <= self.radius:
            return x.copy()
        return self.center + offset * (self.radius / norm)

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.linalg.norm(x - self.center) <= self.radius + tol)

    def sample(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        directions = rng.standard_normal((size, self.dimension))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = self.radius * rng.random(size) ** (1.0 / self.dimension)
        return self.center + directions * radii[:, None]


class Box(FeasibleSet):
    """Caja {x : lo <= x <= hi} coordenada a coordenada"""

    kind = "box"

    def __init__(self, lo: ArrayLike, hi: ArrayLike):
        lo = as_vector(lo, name="lo")
        hi = as_vector(hi, lo.shape[0], "hi")
        super().__init__(lo.shape[0])
        if not np.all(lo < hi):
            raise ContractViolation("Box requiere lo_i < hi_i en todas las coordenadas")
        self.lo = _frozen(lo)
        self.hi = _frozen(hi)
        self._diameter = float(np.linalg.norm(hi - lo))

    @property
    def diameter(self) -> float:
        return self._diameter

    @property
    def strong_convexity(self) -> float:
        return 0.0

    def _lmo(self, g: np.ndarray) -> np.ndarray:
        # empate (g_i = 0) -> hi_i
        return np.where(g > 0, self.lo, self.hi)

    def _project(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lo, self.hi)

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def sample(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(size, self.dimension))


class Simplex(FeasibleSet):
    """Simplex escalado {x >= 0 : sum(x) = scale}"""

    kind = "simplex"

    def __init__(self, dimension: int, scale: float = 1.0):
        super().__init__(dimension)
        if not scale > 0:
            raise ContractViolation(f"scale debe ser positivo, recibido {scale}")
        self.scale = float(scale)

    @property
    def diameter(self) -> float:
        return self.scale * math.sqrt(2.0)

    @property
    def strong_convexity(self) -> float:
        return 0.0

    def _lmo(self, g: np.ndarray) -> np.ndarray:
        vertex = np.zeros(self.dimension)
        # np.argmin devuelve el menor indice en empates
        vertex[int(np.argmin(g))] = self.scale
        return vertex

    def _project(self, x: np.ndarray) -> np.ndarray:
        # ordenar y umbralizar
        u = np.sort(x)[::-1]
        cssv = np.cumsum(u) - self.scale
        ind = np.arange(1, self.dimension + 1)
        rho = ind[u - cssv / ind > 0][-1]
        theta = cssv[rho - 1] / rho
        return np.maximum(x - theta, 0.0)

    def _contains(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.all(x >= -tol) and abs(float(np.sum(x)) - self.scale) <= tol)

    def sample(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        return self.scale * rng.dirichlet(np.ones(self.dimension), size=size)


# Funciones de modulo con la firma de las operaciones


def lmo(feasible_set: FeasibleSet, g: ArrayLike) -> np.ndarray:
    return feasible_set.lmo(g)


def project(feasible_set: FeasibleSet, x: ArrayLike) -> np.ndarray:
    return feasible_set.project(x)


def contains(feasible_set: FeasibleSet, x: ArrayLike, tol: Optional[float] = None) -> bool:
    return feasible_set.contains(x, tol)
