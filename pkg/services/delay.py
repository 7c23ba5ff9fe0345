"""
================================================================================
                    RETRASOS Y COLA DE RETROALIMENTACION
================================================================================
El gradiente consultado en la ronda k llega al final de la ronda
k + d_k - 1, asi que F_t = {k | k + d_k - 1 = t}.
"""

import logging
from collections import defaultdict
from enum import Enum
from typing import DefaultDict, List, Optional, Set, Tuple

import numpy as np

from errors import ContractViolation


logger = logging.getLogger(__name__)


class DelayVariant(str, Enum):
    """Variantes de retraso soportadas"""
    FIXED = "fixed"
    UNIFORM = "uniform"
    BURSTY = "bursty"


class DelaySchedule:
    """
    Secuencia materializada d_1..d_T.

    El arreglo completo se conoce al construirse para reportar
    d = max d_t; los solvers nunca lo leen.
    """

    def __init__(self, variant: DelayVariant, delays: np.ndarray, **params):
        delays = np.asarray(delays, dtype=np.int64)
        if delays.ndim != 1 or delays.size == 0:
            raise ContractViolation("la secuencia de retrasos debe ser 1-D y no vacia")
        if np.any(delays < 1):
            first = int(np.argmax(delays < 1)) + 1
            raise ContractViolation(
                f"retraso invalido d_{first}={int(delays[first - 1])}; se requiere d_t >= 1"
            )
        self.variant = DelayVariant(variant)
        self.params = params
        self._delays = delays
        self._delays.setflags(write=False)

    @classmethod
    def fixed(cls, horizon: int, delay: int) -> "DelaySchedule":
        return cls(DelayVariant.FIXED, np.full(horizon, delay), delay=delay)

    @classmethod
    def uniform(cls, horizon: int, d_max: int, seed: int) -> "DelaySchedule":
        if d_max < 1:
            raise ContractViolation(f"d_max debe ser >= 1, recibido {d_max}")
        rng = np.random.default_rng(seed)
        return cls(
            DelayVariant.UNIFORM,
            rng.integers(1, d_max, size=horizon, endpoint=True),
            d_max=d_max,
            seed=seed,
        )

    @classmethod
    def bursty(cls, horizon: int, period: int, burst_delay: int) -> "DelaySchedule":
        if period < 1:
            raise ContractViolation(f"period debe ser >= 1, recibido {period}")
        rounds = np.arange(1, horizon + 1)
        delays = np.where(rounds % period == 0, burst_delay, 1)
        return cls(DelayVariant.BURSTY, delays, period=period, burst_delay=burst_delay)

    @property
    def horizon(self) -> int:
        return int(self._delays.size)

    @property
    def delays(self) -> np.ndarray:
        return self._delays

    @property
    def max_delay(self) -> int:
        """d = max{d_1, ..., d_T}"""
        return int(self._delays.max())

    def delay(self, t: int) -> int:
        if not 1 <= t <= self.horizon:
            raise ContractViolation(f"ronda t={t} fuera de rango [1, {self.horizon}]")
        return int(self._delays[t - 1])

    def arrival_rounds(self) -> np.ndarray:
        """k + d_k - 1 para cada k"""
        return np.arange(1, self.horizon + 1) + self._delays - 1


class FeedbackQueue:
    """
    Buffer que libera g_k en la ronda k + d_k - 1.

    Estado mutable de un solo dueno: una cola por experimento.
    """

    def __init__(self):
        self._pending: DefaultDict[int, List[Tuple[int, np.ndarray]]] = defaultdict(list)
        self._enqueued: Set[int] = set()
        self._delivered: Set[int] = set()
        self._last_drained: Optional[int] = None
        self.max_batch = 0

    def enqueue(self, k: int, g_k: np.ndarray, d_k: int) -> int:
        """Guarda (k, g_k) bajo la ronda de llegada; retorna esa ronda"""
        if k in self._enqueued:
            raise ContractViolation(f"el gradiente de la ronda k={k} ya fue encolado")
        if d_k < 1:
            raise ContractViolation(f"retraso invalido d_{k}={d_k}")
        arrival = k + d_k - 1
        self._enqueued.add(k)
        self._pending[arrival].append((k, g_k))
        return arrival

    def drain(self, t: int) -> List[Tuple[int, np.ndarray]]:
        """Entrega F_t en orden ascendente de k"""
        if self._last_drained is not None and t <= self._last_drained:
            raise ContractViolation(
                f"drain no monotono: t={t} despues de t={self._last_drained}"
            )
        self._last_drained = t
        arrivals = sorted(self._pending.pop(t, []), key=lambda item: item[0])
        for k, _ in arrivals:
            if k in self._delivered:
                raise ContractViolation(f"el gradiente k={k} se entregaria dos veces")
            self._delivered.add(k)
        self.max_batch = max(self.max_batch, len(arrivals))
        return arrivals

    @property
    def delivered_count(self) -> int:
        return len(self._delivered)

    @property
    def pending_count(self) -> int:
        return sum(len(items) for items in self._pending.values())

    def was_delivered(self, k: int) -> bool:
        return k in self._delivered


# Funciones de modulo con la firma de las operaciones


def schedule_delay(schedule: DelaySchedule, t: int) -> int:
    return schedule.delay(t)


def enqueue(queue: FeedbackQueue, k: int, g_k: np.ndarray, d_k: int) -> None:
    queue.enqueue(k, g_k, d_k)


def drain(queue: FeedbackQueue, t: int) -> List[Tuple[int, np.ndarray]]:
    return queue.drain(t)
