"""
================================================================================
                    SOLVERS EN LINEA: OFW RETRASADO Y OGD
================================================================================
Los solvers solo reciben gradientes ya entregados por la cola; nunca ven
d_t, d ni el calendario de retrasos.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from errors import ContractViolation
from services.geometry import ArrayLike, FeasibleSet, as_vector


logger = logging.getLogger(__name__)


# =============================================================================
# Tamanos de paso
# =============================================================================


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ContractViolation(f"{name} debe ser positivo, recibido {value}")


def eta_general(D: float, G: float, T: int) -> float:
    """eta = D / (sqrt(2) G (T+2)^{3/4}) para conjuntos generales"""
    _check_positive(D=D, G=G, T=T)
    return D / (math.sqrt(2.0) * G * (T + 2) ** 0.75)


def eta_strongly_convex_set(D: float, G: float, T: int) -> float:
    """eta = D / (2 G (T+2)^{2/3}) para conjuntos fuertemente convexos"""
    _check_positive(D=D, G=G, T=T)
    return D / (2.0 * G * (T + 2) ** (2.0 / 3.0))


def ogd_step_size(D: float, G: float, T: int) -> float:
    """Paso constante D / (G sqrt(T)) del OGD retrasado de referencia"""
    _check_positive(D=D, G=G, T=T)
    return D / (G * math.sqrt(T))


# =============================================================================
# Estados
# =============================================================================


@dataclass
class ConvexOFWState:
    """Estado del OFW retrasado para perdidas convexas"""
    y1: np.ndarray
    y: np.ndarray
    gbar: np.ndarray
    eta: float
    tau: int = 1

    @classmethod
    def start(cls, y1: np.ndarray, eta: float) -> "ConvexOFWState":
        _check_positive(eta=eta)
        return cls(y1=y1.copy(), y=y1.copy(), gbar=np.zeros_like(y1), eta=float(eta))


@dataclass
class StronglyConvexOFWState:
    """Estado del OFW retrasado para perdidas fuertemente convexas"""
    y1: np.ndarray
    y: np.ndarray
    gbar: np.ndarray
    ysum: np.ndarray
    beta: float
    tau: int = 1

    @classmethod
    def start(cls, y1: np.ndarray, beta: float) -> "StronglyConvexOFWState":
        _check_positive(beta=beta)
        return cls(
            y1=y1.copy(),
            y=y1.copy(),
            gbar=np.zeros_like(y1),
            ysum=y1.copy(),
            beta=float(beta),
        )


@dataclass
class DelayedOGDState:
    """Estado del OGD retrasado"""
    x: np.ndarray
    step: float
    beta: Optional[float] = None
    received: int = field(default=0)


# =============================================================================
# Gradientes de los sustitutos y busqueda lineal
# =============================================================================


def surrogate_gradient_convex(state: ConvexOFWState, at: np.ndarray) -> np.ndarray:
    """grad F_tau(at) con F_tau(y) = eta <gbar, y> + ||y - y1||^2"""
    return state.eta * state.gbar + 2.0 * (at - state.y1)


def surrogate_gradient_sc(state: StronglyConvexOFWState, at: np.ndarray) -> np.ndarray:
    """grad F_tau(at) con F_tau(y) = <gbar, y> + sum_i (beta/2) ||y - y_i||^2"""
    return state.gbar + state.beta * (state.tau * at - state.ysum)


def _clamped_vertex(dF: np.ndarray, direction: np.ndarray, curvature: float) -> float:
    # min_{s in [0,1]} s <dir, dF> + curvature s^2 ||dir||^2
    squared = float(np.dot(direction, direction))
    if squared == 0.0:
        return 0.0
    sigma = -float(np.dot(direction, dF)) / (2.0 * curvature * squared)
    return min(1.0, max(0.0, sigma))


def line_search_convex(dF: np.ndarray, direction: np.ndarray) -> float:
    """sigma en [0,1] que minimiza <sigma dir, dF> + sigma^2 ||dir||^2"""
    return _clamped_vertex(dF, direction, 1.0)


def line_search_sc(dF: np.ndarray, direction: np.ndarray, beta: float, tau: int) -> float:
    """sigma en [0,1] que minimiza <sigma dir, dF> + (beta tau sigma^2 / 2) ||dir||^2"""
    if not beta > 0 or tau < 1:
        raise ContractViolation(f"se requiere beta > 0 y tau >= 1 (beta={beta}, tau={tau})")
    return _clamped_vertex(dF, direction, 0.5 * beta * tau)


# =============================================================================
# Actualizaciones por gradiente recibido
# =============================================================================


def ingest_gradient_convex(state: ConvexOFWState, g_k: np.ndarray, feasible_set: FeasibleSet) -> None:
    """Un paso lineal de OFW por cada gradiente recibido"""
    state.gbar = state.gbar + g_k
    dF = surrogate_gradient_convex(state, state.y)
    v = feasible_set.lmo(dF)
    direction = v - state.y
    sigma = line_search_convex(dF, direction)
    state.y = state.y + sigma * direction
    state.tau += 1


def ingest_gradient_sc(state: StronglyConvexOFWState, g_k: np.ndarray, feasible_set: FeasibleSet) -> None:
    """Paso de OFW sobre el sustituto fuertemente convexo; ysum pasa a cubrir y_{tau+1}"""
    state.gbar = state.gbar + g_k
    dF = surrogate_gradient_sc(state, state.y)
    v = feasible_set.lmo(dF)
    direction = v - state.y
    sigma = line_search_sc(dF, direction, state.beta, state.tau)
    state.y = state.y + sigma * direction
    state.ysum = state.ysum + state.y
    state.tau += 1


def play(state) -> np.ndarray:
    """Decision actual y_tau (o x para OGD), sin mutar el estado"""
    if isinstance(state, DelayedOGDState):
        return state.x.copy()
    return state.y.copy()


def step_delayed_ogd(state: DelayedOGDState, arrivals: Iterable[np.ndarray], feasible_set: FeasibleSet) -> None:
    """x <- Proj(x - eta sum(arrivals)); sin cambios si no llega nada"""
    arrivals = list(arrivals)
    if not arrivals:
        return
    total = arrivals[0].copy()
    for g in arrivals[1:]:
        total = total + g
    state.received += len(arrivals)
    step = state.step
    if state.beta is not None:
        step = 1.0 / (state.beta * state.received)
    state.x = feasible_set.project(state.x - step * total)


# =============================================================================
# Envolturas usadas por el harness
# =============================================================================


class OnlineSolver(ABC):
    """Interfaz comun: jugar, recibir gradientes entregados"""

    name: str = "solver"

    def __init__(self, feasible_set: FeasibleSet):
        self.feasible_set = feasible_set

    @abstractmethod
    def play(self) -> np.ndarray:
        ...

    @abstractmethod
    def ingest(self, g_k: np.ndarray) -> None:
        ...

    @property
    @abstractmethod
    def tau(self) -> int:
        ...

    def receive(self, gradients: Iterable[np.ndarray]) -> None:
        """Procesa los gradientes de F_t en el orden entregado"""
        for g_k in gradients:
            self.ingest(g_k)


def resolve_initial_point(feasible_set: FeasibleSet, y1: Optional[ArrayLike]) -> np.ndarray:
    """y_1 explicito (validado) o el punto por defecto del conjunto"""
    if y1 is None:
        return feasible_set.initial_point()
    point = as_vector(y1, feasible_set.dimension, "y1")
    if not feasible_set.contains(point):
        raise ContractViolation("y1 no pertenece al conjunto factible")
    return point


class DelayedOFW(OnlineSolver):
    """OFW retrasado para perdidas convexas"""

    name = "dofw_convex"

    def __init__(self, feasible_set: FeasibleSet, eta: float, y1: Optional[ArrayLike] = None):
        super().__init__(feasible_set)
        self.state = ConvexOFWState.start(resolve_initial_point(feasible_set, y1), eta)

    def play(self) -> np.ndarray:
        return play(self.state)

    def ingest(self, g_k: np.ndarray) -> None:
        ingest_gradient_convex(self.state, g_k, self.feasible_set)

    @property
    def tau(self) -> int:
        return self.state.tau


class DelayedStronglyConvexOFW(OnlineSolver):
    """OFW retrasado para perdidas beta-fuertemente convexas"""

    name = "dofw_sc"

    def __init__(self, feasible_set: FeasibleSet, beta: float, y1: Optional[ArrayLike] = None):
        super().__init__(feasible_set)
        self.state = StronglyConvexOFWState.start(resolve_initial_point(feasible_set, y1), beta)

    def play(self) -> np.ndarray:
        return play(self.state)

    def ingest(self, g_k: np.ndarray) -> None:
        ingest_gradient_sc(self.state, g_k, self.feasible_set)

    @property
    def tau(self) -> int:
        return self.state.tau


class DelayedOGD(OnlineSolver):
    """OGD retrasado: un paso con la suma de lo recibido en cada ronda"""

    name = "delayed_ogd"

    def __init__(
        self,
        feasible_set: FeasibleSet,
        step: float,
        y1: Optional[ArrayLike] = None,
        beta: Optional[float] = None,
    ):
        super().__init__(feasible_set)
        _check_positive(step=step)
        if beta is not None:
            _check_positive(beta=beta)
        self.state = DelayedOGDState(
            x=resolve_initial_point(feasible_set, y1), step=float(step), beta=beta
        )

    def play(self) -> np.ndarray:
        return play(self.state)

    def ingest(self, g_k: np.ndarray) -> None:
        step_delayed_ogd(self.state, [g_k], self.feasible_set)

    def receive(self, gradients: Iterable[np.ndarray]) -> None:
        step_delayed_ogd(self.state, gradients, self.feasible_set)

    @property
    def tau(self) -> int:
        return 1 + self.state.received
