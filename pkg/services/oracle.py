"""
================================================================================
                    ORACULOS DE VERIFICACION
================================================================================
Calculos de referencia independientes de services.solvers: minimizadores
exactos de los sustitutos, OFW sin retrasos, comparadores fuera de linea y
busqueda lineal por fuerza bruta. Solo los usan las pruebas, el comando
gapcheck y los algoritmos *_reference del harness.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, List, Optional, Sequence, Union

import numpy as np

from config import get_settings
from errors import ContractViolation, InvariantViolation
from services.geometry import ArrayLike, FeasibleSet, as_vector
from services.losses import LinearStream, LossStream, QuadraticStream


logger = logging.getLogger(__name__)

GradientSource = Union[Sequence[np.ndarray], Callable[[int, np.ndarray], np.ndarray]]


# =============================================================================
# Sustitutos: valores, minimizadores exactos y cotas de brecha
# =============================================================================
# Ambos sustitutos tienen Hessiano isotropico (2I y beta*tau*I), por eso el
# minimizador restringido es la proyeccion del vertice sin restricciones.
# Un sustituto no isotropico necesitaria otro metodo.


def surrogate_value_convex(gbar: np.ndarray, y1: np.ndarray, eta: float, y: np.ndarray) -> float:
    """F(y) = eta <gbar, y> + ||y - y1||^2"""
    diff = y - y1
    return eta * float(np.dot(gbar, y)) + float(np.dot(diff, diff))


def surrogate_value_sc(gbar: np.ndarray, history: Sequence[np.ndarray], beta: float, y: np.ndarray) -> float:
    """F(y) = <gbar, y> + sum_i (beta/2) ||y - y_i||^2 con la historia explicita"""
    total = float(np.dot(gbar, y))
    for point in history:
        diff = y - point
        total += 0.5 * beta * float(np.dot(diff, diff))
    return total


def surrogate_gap_convex(gbar: np.ndarray, y1: np.ndarray, eta: float, y: np.ndarray, y_star: np.ndarray) -> float:
    return surrogate_value_convex(gbar, y1, eta, y) - surrogate_value_convex(gbar, y1, eta, y_star)


def surrogate_gap_sc(
    gbar: np.ndarray,
    ysum: np.ndarray,
    count: int,
    beta: float,
    y: np.ndarray,
    y_star: np.ndarray,
) -> float:
    """F(y) - F(y*) usando solo la suma y el conteo de la historia"""
    linear = float(np.dot(gbar, y - y_star))
    quadratic = count * (float(np.dot(y, y)) - float(np.dot(y_star, y_star)))
    cross = 2.0 * float(np.dot(y - y_star, ysum))
    return linear + 0.5 * beta * (quadratic - cross)


def exact_surrogate_min_convex(feasible_set: FeasibleSet, gbar: ArrayLike, y1: ArrayLike, eta: float) -> np.ndarray:
    """argmin_K eta <gbar, y> + ||y - y1||^2"""
    gbar = as_vector(gbar, feasible_set.dimension, "gbar")
    y1 = as_vector(y1, feasible_set.dimension, "y1")
    return feasible_set.project(y1 - 0.5 * eta * gbar)


def exact_surrogate_min_sc(
    feasible_set: FeasibleSet,
    gbar: ArrayLike,
    ysum: ArrayLike,
    tau: int,
    beta: float,
) -> np.ndarray:
    """argmin_K <gbar, y> + sum_{i<=tau} (beta/2) ||y - y_i||^2"""
    if not beta > 0 or tau < 1:
        raise ContractViolation(f"se requiere beta > 0 y tau >= 1 (beta={beta}, tau={tau})")
    gbar = as_vector(gbar, feasible_set.dimension, "gbar")
    ysum = as_vector(ysum, feasible_set.dimension, "ysum")
    return feasible_set.project(ysum / tau - gbar / (beta * tau))


def gap_bound_convex(D: float, tau: int) -> float:
    """8 D^2 / sqrt(tau + 2)"""
    return 8.0 * D * D / math.sqrt(tau + 2)


def gap_bound_sc(G: float, beta: float, D: float, tau: int) -> float:
    """16 (G + 2 beta D)^2 (tau - 1)^{1/3} / beta, para tau >= 2"""
    if tau < 2:
        raise ContractViolation(f"la cota fuertemente convexa requiere tau >= 2, recibido {tau}")
    return 16.0 * (G + 2.0 * beta * D) ** 2 * (tau - 1) ** (1.0 / 3.0) / beta


def regret_bound_general(D: float, G: float, T: int, d: int) -> float:
    """Cota explicita de arrepentimiento del OFW retrasado convexo con eta general"""
    GD = G * D
    sqrt2 = math.sqrt(2.0)
    return (
        (3.0 + 8.0 * sqrt2) * GD * d
        + 32.0 * sqrt2 * GD * T ** 0.75 / 3.0
        + 3.0 * GD * d * T ** 0.25 / (2.0 * sqrt2)
        + 11.0 * sqrt2 * GD * (T + 2) ** 0.75 / 3.0
        + GD * T ** 0.25 / sqrt2
    )


@dataclass
class GapRecord:
    """Brecha del sustituto observada antes de un paso"""
    tau: int
    gap: float
    bound: float

    @property
    def violated(self) -> bool:
        return self.gap > self.bound


@dataclass
class SurrogateGapMonitor:
    """
    Verifica F_{tau-1}(y_tau) - F_{tau-1}(y*_tau) <= cota antes de cada
    paso del solver (y una vez al final).
    """
    feasible_set: FeasibleSet
    gradient_bound: float
    strict: bool = False
    records: List[GapRecord] = field(default_factory=list)

    @property
    def violations(self) -> List[GapRecord]:
        return [record for record in self.records if record.violated]

    @property
    def worst_ratio(self) -> float:
        ratios = [record.gap / record.bound for record in self.records if record.bound > 0]
        return max(ratios, default=0.0)

    def observe(self, state) -> Optional[GapRecord]:
        D = self.feasible_set.diameter
        if hasattr(state, "ysum"):
            if state.tau < 2:
                return None
            prior_sum = state.ysum - state.y
            count = state.tau - 1
            y_star = exact_surrogate_min_sc(self.feasible_set, state.gbar, prior_sum, count, state.beta)
            gap = surrogate_gap_sc(state.gbar, prior_sum, count, state.beta, state.y, y_star)
            bound = gap_bound_sc(self.gradient_bound, state.beta, D, state.tau)
        else:
            y_star = exact_surrogate_min_convex(self.feasible_set, state.gbar, state.y1, state.eta)
            gap = surrogate_gap_convex(state.gbar, state.y1, state.eta, state.y, y_star)
            bound = gap_bound_convex(D, state.tau)
        record = GapRecord(tau=state.tau, gap=gap, bound=bound)
        self.records.append(record)
        if record.violated:
            logger.warning("Brecha del sustituto excede la cota en tau=%d: %.6g > %.6g", record.tau, gap, bound)
            if self.strict:
                raise InvariantViolation(
                    f"brecha del sustituto {gap:.6g} > cota {bound:.6g} en tau={record.tau}"
                )
        return record


# =============================================================================
# OFW sin retrasos (implementacion de libro, sin codigo compartido)
# =============================================================================


class ReferenceOFW:
    """OFW clasico para perdidas convexas: x_{t+1} = x_t + s_t (v_t - x_t)"""

    name = "ofw_reference"

    def __init__(self, feasible_set: FeasibleSet, eta: float, x1: Optional[ArrayLike] = None):
        self.feasible_set = feasible_set
        self.eta = float(eta)
        start = feasible_set.initial_point() if x1 is None else as_vector(x1, feasible_set.dimension, "x1")
        self.x1 = start.copy()
        self.x = start.copy()
        self.gradient_total = np.zeros(feasible_set.dimension)
        self.t = 0

    def play(self) -> np.ndarray:
        return self.x.copy()

    def ingest(self, g_t: np.ndarray) -> None:
        self.t += 1
        self.gradient_total = self.gradient_total + g_t
        grad = self.eta * self.gradient_total + 2.0 * (self.x - self.x1)
        v = self.feasible_set.lmo(grad)
        step = v - self.x
        length2 = float(step @ step)
        if length2 > 0.0:
            s = float(np.clip(-float(step @ grad) / (2.0 * length2), 0.0, 1.0))
            self.x = self.x + s * step

    def receive(self, gradients: Iterable[np.ndarray]) -> None:
        for g_t in gradients:
            self.ingest(g_t)

    @property
    def tau(self) -> int:
        return self.t + 1


class ReferenceStronglyConvexOFW:
    """OFW clasico para perdidas beta-fuertemente convexas"""

    name = "ofw_sc_reference"

    def __init__(self, feasible_set: FeasibleSet, beta: float, x1: Optional[ArrayLike] = None):
        if not beta > 0:
            raise ContractViolation(f"beta debe ser positivo, recibido {beta}")
        self.feasible_set = feasible_set
        self.beta = float(beta)
        start = feasible_set.initial_point() if x1 is None else as_vector(x1, feasible_set.dimension, "x1")
        self.x = start.copy()
        self.decision_total = start.copy()
        self.gradient_total = np.zeros(feasible_set.dimension)
        self.t = 0

    def play(self) -> np.ndarray:
        return self.x.copy()

    def ingest(self, g_t: np.ndarray) -> None:
        self.t += 1
        self.gradient_total = self.gradient_total + g_t
        # sum_{i<=t} (g_i + beta (x - x_i))
        grad = self.gradient_total + self.beta * (self.t * self.x - self.decision_total)
        v = self.feasible_set.lmo(grad)
        step = v - self.x
        length2 = float(step @ step)
        if length2 > 0.0:
            s = float(np.clip(-float(step @ grad) / (self.beta * self.t * length2), 0.0, 1.0))
            self.x = self.x + s * step
        self.decision_total = self.decision_total + self.x

    def receive(self, gradients: Iterable[np.ndarray]) -> None:
        for g_t in gradients:
            self.ingest(g_t)

    @property
    def tau(self) -> int:
        return self.t + 1


def _run_reference(solver, gradients: GradientSource, rounds: Optional[int]) -> List[np.ndarray]:
    trajectory = [solver.play()]
    if callable(gradients):
        if rounds is None:
            raise ContractViolation("rounds es obligatorio cuando los gradientes dependen del punto")
        for t in range(1, rounds + 1):
            solver.ingest(np.asarray(gradients(t, solver.play()), dtype=np.float64))
            trajectory.append(solver.play())
    else:
        for g_t in gradients:
            solver.ingest(np.asarray(g_t, dtype=np.float64))
            trajectory.append(solver.play())
    return trajectory


def reference_ofw_convex(
    feasible_set: FeasibleSet,
    gradients: GradientSource,
    eta: float,
    x1: Optional[ArrayLike] = None,
    rounds: Optional[int] = None,
) -> List[np.ndarray]:
    """Trayectoria x_1..x_{T+1} del OFW sin retrasos"""
    return _run_reference(ReferenceOFW(feasible_set, eta, x1), gradients, rounds)


def reference_ofw_sc(
    feasible_set: FeasibleSet,
    gradients: GradientSource,
    beta: float,
    x1: Optional[ArrayLike] = None,
    rounds: Optional[int] = None,
) -> List[np.ndarray]:
    """Trayectoria x_1..x_{T+1} del OFW fuertemente convexo sin retrasos"""
    return _run_reference(ReferenceStronglyConvexOFW(feasible_set, beta, x1), gradients, rounds)


# =============================================================================
# Busqueda lineal por fuerza bruta
# =============================================================================


def grid_line_search(dF: ArrayLike, direction: ArrayLike, curvature: float, step: Optional[float] = None) -> float:
    """argmin sobre sigma en {0, step, ..., 1} de <sigma dir, dF> + curvature sigma^2 ||dir||^2"""
    if not curvature > 0:
        raise ContractViolation(f"curvature debe ser positiva, recibido {curvature}")
    step = get_settings().grid_step if step is None else step
    dF = np.asarray(dF, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    sigmas = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    objective = sigmas * float(direction @ dF) + curvature * sigmas ** 2 * float(direction @ direction)
    return float(sigmas[int(np.argmin(objective))])


# =============================================================================
# Comparador fuera de linea
# =============================================================================


class ComparatorMethod(str, Enum):
    CLOSED_FORM_LINEAR = "closed_form_linear"
    CLOSED_FORM_QUADRATIC = "closed_form_quadratic"
    OFFLINE_FW = "offline_fw"


@dataclass
class ComparatorResult:
    """Mejor decision fija en retrospectiva"""
    x_star: np.ndarray
    offline_total: float
    method: ComparatorMethod
    certified_gap: float = 0.0
    iterations: int = 0


def offline_frank_wolfe(
    feasible_set: FeasibleSet,
    stream: LossStream,
    max_iter: Optional[int] = None,
    gap_tol: Optional[float] = None,
    line_search: bool = True,
) -> ComparatorResult:
    """
    Frank-Wolfe sobre sum_t f_t hasta brecha de dualidad <= gap_tol.

    Con line_search el paso es exacto usando la curvatura del flujo; si no,
    el paso clasico 2/(k+2). No alcanzar la tolerancia se reporta, no falla.
    """
    settings = get_settings()
    max_iter = settings.offline_fw_max_iter if max_iter is None else max_iter
    gap_tol = settings.offline_fw_gap_tol if gap_tol is None else gap_tol
    curvature = stream.curvature

    x = feasible_set.initial_point()
    gap = math.inf
    iteration = 0
    for iteration in range(max_iter):
        grad = stream.total_gradient(x)
        v = feasible_set.lmo(grad)
        direction = v - x
        gap = -float(grad @ direction)
        if gap <= gap_tol:
            break
        if line_search:
            squared = float(direction @ direction)
            if curvature > 0:
                sigma = min(1.0, max(0.0, gap / (curvature * squared)))
            else:
                sigma = 1.0
        else:
            sigma = 2.0 / (iteration + 2.0)
        x = x + sigma * direction
    else:
        grad = stream.total_gradient(x)
        gap = -float(grad @ (feasible_set.lmo(grad) - x))

    if gap > gap_tol:
        logger.warning("Frank-Wolfe fuera de linea no alcanzo la brecha %.3g (brecha final %.3g)", gap_tol, gap)

    return ComparatorResult(
        x_star=x,
        offline_total=float(np.sum(stream.values_at(x))),
        method=ComparatorMethod.OFFLINE_FW,
        certified_gap=max(gap, 0.0),
        iterations=iteration + 1,
    )


def offline_comparator(
    feasible_set: FeasibleSet,
    stream: LossStream,
    method: Optional[ComparatorMethod] = None,
) -> ComparatorResult:
    """min_{x in K} sum_t f_t(x), en forma cerrada cuando el flujo lo permite"""
    if method is None:
        if isinstance(stream, LinearStream):
            method = ComparatorMethod.CLOSED_FORM_LINEAR
        elif isinstance(stream, QuadraticStream):
            method = ComparatorMethod.CLOSED_FORM_QUADRATIC
        else:
            method = ComparatorMethod.OFFLINE_FW
    method = ComparatorMethod(method)

    if method is ComparatorMethod.CLOSED_FORM_LINEAR:
        if not isinstance(stream, LinearStream):
            raise ContractViolation("closed_form_linear requiere un LinearStream")
        x_star = feasible_set.lmo(stream.gradient_sum)
    elif method is ComparatorMethod.CLOSED_FORM_QUADRATIC:
        if not isinstance(stream, QuadraticStream):
            raise ContractViolation("closed_form_quadratic requiere un QuadraticStream")
        # sum_t f_t(x) = (T beta / 2) ||x - mean(theta)||^2 + const
        x_star = feasible_set.project(stream.target_mean)
    else:
        return offline_frank_wolfe(feasible_set, stream)

    return ComparatorResult(
        x_star=x_star,
        offline_total=float(np.sum(stream.values_at(x_star))),
        method=method,
    )
