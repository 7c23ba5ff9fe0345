"""
================================================================================
                    FLUJOS DE PERDIDAS EN LINEA (ADVERSARIOS)
================================================================================
"""

import logging
from abc import ABC, abstractmethod
from typing import Dict, List, Optional

import numpy as np

from errors import ContractViolation
from services.geometry import ArrayLike, FeasibleSet, as_vector


logger = logging.getLogger(__name__)


def _as_rows(values: ArrayLike, name: str, dimension: Optional[int] = None) -> np.ndarray:
    """Matriz (T, n) finita y no vacia"""
    rows = np.atleast_2d(np.asarray(values, dtype=np.float64))
    if rows.ndim != 2 or 0 in rows.shape:
        raise ContractViolation(f"{name} debe tener forma (T, n) con T >= 1, tiene forma {rows.shape}")
    if dimension is not None and rows.shape[1] != dimension:
        raise ContractViolation(f"{name} tiene dimension {rows.shape[1]}, se esperaba {dimension}")
    if not np.all(np.isfinite(rows)):
        raise ContractViolation(f"{name} contiene valores no finitos")
    return rows


class LossStream(ABC):
    """
    Secuencia f_1..f_T fijada al construirse.

    Toda la aleatoriedad se extrae una sola vez desde rng_seed, asi que
    value/gradient son puros y reproducibles sin importar los retrasos.
    """

    kind: str = "stream"

    def __init__(self, dimension: int, horizon: int, rng_seed: int):
        if horizon < 1:
            raise ContractViolation(f"horizon debe ser >= 1, recibido {horizon}")
        self.dimension = int(dimension)
        self.horizon = int(horizon)
        self.rng_seed = int(rng_seed)

    @property
    @abstractmethod
    def gradient_bound(self) -> float:
        """G de la cota ||grad f_t(x)|| <= G sobre K"""

    @property
    @abstractmethod
    def strong_convexity(self) -> float:
        """beta; 0 para perdidas solo convexas"""

    def _check_round(self, t: int) -> int:
        if not 1 <= t <= self.horizon:
            raise ContractViolation(f"ronda t={t} fuera de rango [1, {self.horizon}]")
        return t - 1

    @abstractmethod
    def value(self, t: int, x: ArrayLike) -> float:
        ...

    @abstractmethod
    def gradient(self, t: int, x: ArrayLike) -> np.ndarray:
        ...

    @abstractmethod
    def values_at(self, x: ArrayLike) -> np.ndarray:
        """Vector (f_1(x), ..., f_T(x)) para un punto fijo"""

    @abstractmethod
    def total_gradient(self, x: ArrayLike) -> np.ndarray:
        """Gradiente de sum_t f_t en x"""

    @property
    def curvature(self) -> float:
        """Hessiano de sum_t f_t como multiplo de la identidad"""
        return self.horizon * self.strong_convexity

    @abstractmethod
    def parameters(self) -> List[Dict[str, float]]:
        """Parametros por ronda, para volcar a CSV"""


class LinearStream(LossStream):
    """f_t(x) = <g_t, x> con g_t uniforme en la esfera de radio G"""

    kind = "linear"

    def __init__(self, dimension: int, horizon: int, gradient_bound: float, rng_seed: int):
        super().__init__(dimension, horizon, rng_seed)
        if not gradient_bound > 0:
            raise ContractViolation(f"G debe ser positivo, recibido {gradient_bound}")
        rng = np.random.default_rng(self.rng_seed)
        directions = rng.standard_normal((self.horizon, self.dimension))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        self._set_gradients(directions * float(gradient_bound), float(gradient_bound))

    @classmethod
    def from_gradients(cls, gradients: ArrayLike) -> "LinearStream":
        """Flujo con gradientes dados (G = mayor norma)"""
        rows = _as_rows(gradients, "gradients")
        stream = cls.__new__(cls)
        LossStream.__init__(stream, rows.shape[1], rows.shape[0], 0)
        norms = np.linalg.norm(rows, axis=1)
        stream._set_gradients(rows, float(max(norms.max(), np.finfo(float).tiny)))
        return stream

    def _set_gradients(self, rows: np.ndarray, gradient_bound: float) -> None:
        self._G = gradient_bound
        self.gradients = rows.copy()
        self.gradients.setflags(write=False)
        self._gradient_sum = self.gradients.sum(axis=0)

    @property
    def gradient_bound(self) -> float:
        return self._G

    @property
    def strong_convexity(self) -> float:
        return 0.0

    @property
    def gradient_sum(self) -> np.ndarray:
        return self._gradient_sum.copy()

    def value(self, t: int, x: ArrayLike) -> float:
        index = self._check_round(t)
        return float(np.dot(self.gradients[index], as_vector(x, self.dimension, "x")))

    def gradient(self, t: int, x: ArrayLike) -> np.ndarray:
        index = self._check_round(t)
        return self.gradients[index].copy()

    def values_at(self, x: ArrayLike) -> np.ndarray:
        return self.gradients @ as_vector(x, self.dimension, "x")

    def total_gradient(self, x: ArrayLike) -> np.ndarray:
        return self._gradient_sum.copy()

    def parameters(self) -> List[Dict[str, float]]:
        return [
            {f"g_{i}": float(value) for i, value in enumerate(row)}
            for row in self.gradients
        ]


class QuadraticStream(LossStream):
    """f_t(x) = (beta/2) ||x - theta_t||^2 con theta_t uniforme en K"""

    kind = "quadratic"

    def __init__(self, feasible_set: FeasibleSet, horizon: int, beta: float, rng_seed: int):
        super().__init__(feasible_set.dimension, horizon, rng_seed)
        rng = np.random.default_rng(self.rng_seed)
        self._set_targets(feasible_set, feasible_set.sample(rng, self.horizon), beta)

    @classmethod
    def from_targets(cls, feasible_set: FeasibleSet, targets: ArrayLike, beta: float) -> "QuadraticStream":
        """Flujo con centros dados; deben estar en K para que G = beta * D valga"""
        rows = _as_rows(targets, "targets", feasible_set.dimension)
        outside = [i + 1 for i, row in enumerate(rows) if not feasible_set.contains(row)]
        if outside:
            raise ContractViolation(f"centros fuera de {feasible_set.describe()} en las rondas {outside[:5]}")
        stream = cls.__new__(cls)
        LossStream.__init__(stream, rows.shape[1], rows.shape[0], 0)
        stream._set_targets(feasible_set, rows, beta)
        return stream

    def _set_targets(self, feasible_set: FeasibleSet, rows: np.ndarray, beta: float) -> None:
        # G = beta * D: ||beta (x - theta)|| <= beta ||x - theta|| <= beta D
        if not beta > 0:
            raise ContractViolation(f"beta debe ser positivo, recibido {beta}")
        self.beta = float(beta)
        self._G = self.beta * feasible_set.diameter
        self.targets = rows.copy()
        self.targets.setflags(write=False)
        self._target_sum = self.targets.sum(axis=0)

    @property
    def gradient_bound(self) -> float:
        return self._G

    @property
    def strong_convexity(self) -> float:
        return self.beta

    @property
    def target_mean(self) -> np.ndarray:
        return self._target_sum / self.horizon

    def value(self, t: int, x: ArrayLike) -> float:
        index = self._check_round(t)
        diff = as_vector(x, self.dimension, "x") - self.targets[index]
        return 0.5 * self.beta * float(np.dot(diff, diff))

    def gradient(self, t: int, x: ArrayLike) -> np.ndarray:
        index = self._check_round(t)
        return self.beta * (as_vector(x, self.dimension, "x") - self.targets[index])

    def values_at(self, x: ArrayLike) -> np.ndarray:
        diff = self.targets - as_vector(x, self.dimension, "x")
        return 0.5 * self.beta * np.einsum("ij,ij->i", diff, diff)

    def total_gradient(self, x: ArrayLike) -> np.ndarray:
        return self.beta * (self.horizon * as_vector(x, self.dimension, "x") - self._target_sum)

    def parameters(self) -> List[Dict[str, float]]:
        return [
            {f"theta_{i}": float(value) for i, value in enumerate(row)}
            for row in self.targets
        ]


# Funciones de modulo con la firma de las operaciones


def value(stream: LossStream, t: int, x: ArrayLike) -> float:
    return stream.value(t, x)


def gradient(stream: LossStream, t: int, x: ArrayLike) -> np.ndarray:
    return stream.gradient(t, x)
