"""
================================================================================
                    HARNESS DE EXPERIMENTOS
================================================================================
Bucle por ronda: jugar, registrar f_t(x_t), consultar g_t, encolar con d_t,
vaciar F_t e ingerir en orden. Luego el comparador fuera de linea llena el
regret. Todo queda determinado por la configuracion.
"""

import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from statistics import median
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config import get_settings
from errors import ConfigError, ContractViolation, InvariantViolation
from services.delay import DelaySchedule, FeedbackQueue
from services.geometry import Box, FeasibleSet, L2Ball, Simplex
from services.losses import LinearStream, LossStream, QuadraticStream
from services.oracle import (
    ReferenceOFW,
    ReferenceStronglyConvexOFW,
    SurrogateGapMonitor,
    offline_comparator,
    regret_bound_general,
)
from services.solvers import (
    DelayedOFW,
    DelayedOGD,
    DelayedStronglyConvexOFW,
    eta_general,
    eta_strongly_convex_set,
    ogd_step_size,
)
from storage.models import (
    Algorithm,
    DelayKind,
    DelaySpec,
    EtaRule,
    ExperimentConfig,
    ExperimentResult,
    OGDStep,
    RoundLog,
    SetKind,
    SetSpec,
    StreamKind,
    StreamSpec,
    SweepRow,
)


logger = logging.getLogger(__name__)

REFERENCE_ALGORITHMS = (Algorithm.OFW_REFERENCE, Algorithm.OFW_SC_REFERENCE)
MONITORED_ALGORITHMS = (Algorithm.DOFW_CONVEX, Algorithm.DOFW_SC)


# =============================================================================
# Construccion de componentes desde la configuracion
# =============================================================================


def build_feasible_set(spec: SetSpec) -> FeasibleSet:
    if spec.kind is SetKind.BOX:
        return Box(spec.lo, spec.hi)
    if spec.kind is SetKind.L2_BALL:
        return L2Ball(spec.center, spec.radius)
    return Simplex(spec.dimension, spec.scale)


def stream_seed(config: ExperimentConfig) -> int:
    return config.losses.seed if config.losses.seed is not None else config.run.base_seed


def delay_seed(config: ExperimentConfig) -> int:
    return config.delays.seed if config.delays.seed is not None else config.run.base_seed + 1


def build_stream(spec: StreamSpec, feasible_set: FeasibleSet, horizon: int, seed: int) -> LossStream:
    if spec.kind is StreamKind.LINEAR:
        return LinearStream(feasible_set.dimension, horizon, spec.gradient_bound, seed)
    return QuadraticStream(feasible_set, horizon, spec.beta, seed)


def build_schedule(spec: DelaySpec, horizon: int, seed: int) -> DelaySchedule:
    if spec.kind is DelayKind.UNIFORM:
        return DelaySchedule.uniform(horizon, spec.d_max, seed)
    if spec.kind is DelayKind.BURSTY:
        return DelaySchedule.bursty(horizon, spec.period, spec.burst_delay)
    return DelaySchedule.fixed(horizon, spec.delay)


def resolve_eta(config: ExperimentConfig, feasible_set: FeasibleSet, stream: LossStream) -> float:
    """eta segun eta_rule; D y G salen del conjunto y del flujo"""
    rule = config.run.eta_rule
    if rule is EtaRule.EXPLICIT:
        return float(config.run.eta)
    D, G, T = feasible_set.diameter, stream.gradient_bound, config.run.horizon
    if rule is EtaRule.STRONGLY_CONVEX_SET:
        if feasible_set.strong_convexity == 0.0:
            logger.warning(
                "eta_rule strongly_convex_set sobre %s, que no es fuertemente convexo",
                feasible_set.describe(),
            )
        return eta_strongly_convex_set(D, G, T)
    return eta_general(D, G, T)


def build_solver(config: ExperimentConfig, feasible_set: FeasibleSet, stream: LossStream):
    """Solver listo para jugar y_1"""
    algorithm = config.run.algorithm
    y1 = config.run.y1
    if algorithm is Algorithm.DOFW_CONVEX:
        return DelayedOFW(feasible_set, resolve_eta(config, feasible_set, stream), y1)
    if algorithm is Algorithm.DOFW_SC:
        return DelayedStronglyConvexOFW(feasible_set, config.solver_beta, y1)
    if algorithm is Algorithm.OFW_REFERENCE:
        return ReferenceOFW(feasible_set, resolve_eta(config, feasible_set, stream), y1)
    if algorithm is Algorithm.OFW_SC_REFERENCE:
        return ReferenceStronglyConvexOFW(feasible_set, config.solver_beta, y1)

    step = ogd_step_size(feasible_set.diameter, stream.gradient_bound, config.run.horizon)
    beta = config.solver_beta if config.run.ogd_step is OGDStep.STRONGLY_CONVEX else None
    return DelayedOGD(feasible_set, step, y1, beta=beta)


# =============================================================================
# Ejecucion
# =============================================================================


class ExperimentRunner:
    """Ejecuta experimentos y barridos"""

    def __init__(self):
        self.settings = get_settings()

    def run(
        self,
        config: ExperimentConfig,
        monitor: Optional[SurrogateGapMonitor] = None,
    ) -> ExperimentResult:
        """
        Ejecuta un experimento completo.

        Args:
            config: Configuracion validada
            monitor: Si se entrega, verifica la brecha del sustituto antes
                de cada gradiente ingerido y una vez al final

        Returns:
            ExperimentResult con el registro por ronda y el regret final
        """
        started = time.perf_counter()
        run = config.run
        T = run.horizon

        feasible_set = build_feasible_set(config.problem)
        stream = build_stream(config.losses, feasible_set, T, stream_seed(config))
        schedule = build_schedule(config.delays, T, delay_seed(config))
        solver = build_solver(config, feasible_set, stream)

        if monitor is not None and run.algorithm not in MONITORED_ALGORITHMS:
            raise ConfigError(
                f"la verificacion de brecha solo aplica a dofw_convex y dofw_sc, no a {run.algorithm.value}"
            )

        logger.info(
            "Experimento %s sobre %s: T=%d, retrasos %s (d=%d)",
            run.algorithm.value,
            feasible_set.describe(),
            T,
            schedule.variant.value,
            schedule.max_delay,
        )

        delayed = run.algorithm not in REFERENCE_ALGORITHMS
        queue = FeedbackQueue()
        losses = np.empty(T)
        arrivals_per_round = np.zeros(T, dtype=np.int64)
        taus = np.empty(T, dtype=np.int64)

        for t in range(1, T + 1):
            x_t = solver.play()
            if not feasible_set.contains(x_t):
                raise InvariantViolation(f"la decision de la ronda {t} no pertenece al conjunto factible")
            losses[t - 1] = stream.value(t, x_t)
            g_t = stream.gradient(t, x_t)

            if delayed:
                queue.enqueue(t, g_t, schedule.delay(t))
                arrivals = [g_k for _, g_k in queue.drain(t)]
            else:
                arrivals = [g_t]

            if monitor is not None:
                for g_k in arrivals:
                    monitor.observe(solver.state)
                    solver.ingest(g_k)
            else:
                solver.receive(arrivals)

            arrivals_per_round[t - 1] = len(arrivals)
            taus[t - 1] = solver.tau

        if monitor is not None:
            monitor.observe(solver.state)

        comparator = offline_comparator(feasible_set, stream)
        logger.info(
            "Comparador %s: total %.6g, brecha certificada %.3g",
            comparator.method.value,
            comparator.offline_total,
            comparator.certified_gap,
        )
        cum_loss = np.cumsum(losses)
        cum_regret = cum_loss - np.cumsum(stream.values_at(comparator.x_star))

        rounds = [
            RoundLog(
                t=t,
                loss=float(losses[t - 1]),
                cum_loss=float(cum_loss[t - 1]),
                arrivals=int(arrivals_per_round[t - 1]),
                tau=int(taus[t - 1]),
                cum_regret=float(cum_regret[t - 1]),
            )
            for t in range(1, T + 1)
        ]

        regret_bound = None
        if run.algorithm is Algorithm.DOFW_CONVEX and run.eta_rule is EtaRule.GENERAL:
            regret_bound = regret_bound_general(
                feasible_set.diameter, stream.gradient_bound, T, schedule.max_delay
            )

        cumulative_loss = float(cum_loss[-1])
        result = ExperimentResult(
            config=config,
            rounds=rounds,
            regret=cumulative_loss - comparator.offline_total,
            cumulative_loss=cumulative_loss,
            offline_total=comparator.offline_total,
            comparator_method=comparator.method.value,
            certified_gap=comparator.certified_gap,
            max_delay=schedule.max_delay,
            undelivered=queue.pending_count if delayed else 0,
            regret_bound=regret_bound,
            gap_checks=len(monitor.records) if monitor is not None else 0,
            gap_violations=len(monitor.violations) if monitor is not None else 0,
            wall_ms=(time.perf_counter() - started) * 1000.0,
        )
        logger.info(
            "Experimento terminado: R(T)=%.6g, %d gradientes sin llegar, %.1f ms",
            result.regret,
            result.undelivered,
            result.wall_ms,
        )
        return result

    def sweep(
        self,
        base: ExperimentConfig,
        T_list: Sequence[int],
        d_list: Sequence[int],
        seeds: int = 1,
        workers: Optional[int] = None,
    ) -> List[SweepRow]:
        """
        Grilla de experimentos (T, d, replica).

        Cada celda deriva su semilla de (T, d), asi que el orden y el
        paralelismo no cambian los resultados.
        """
        if not T_list or not d_list:
            raise ContractViolation("T_list y d_list no pueden estar vacias")
        if seeds < 1:
            raise ContractViolation(f"seeds debe ser >= 1, recibido {seeds}")
        workers = self.settings.sweep_workers if workers is None else workers

        cells = [
            (T, d, base.with_cell(T, d, cell_seed(base.run.base_seed, T, d, replicate)))
            for T in T_list
            for d in d_list
            for replicate in range(seeds)
        ]
        logger.info("Barrido de %d celdas con %d proceso(s)", len(cells), workers)

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                rows = list(executor.map(_run_cell, cells))
        else:
            rows = []
            for index, cell in enumerate(cells, start=1):
                rows.append(_run_cell(cell))
                logger.info("Celda %d/%d: T=%d d=%d R=%.6g", index, len(cells), cell[0], cell[1], rows[-1].regret)
        return rows


def _run_cell(cell: Tuple[int, int, ExperimentConfig]) -> SweepRow:
    T, d, config = cell
    result = ExperimentRunner().run(config)
    return SweepRow(
        T=T,
        d_max=d,
        algo=config.run.algorithm.value,
        set=config.problem.kind.value,
        seed=config.run.base_seed,
        regret=result.regret,
        wall_ms=result.wall_ms,
    )


@lru_cache()
def get_experiment_runner() -> ExperimentRunner:
    """Obtiene la instancia singleton del runner"""
    return ExperimentRunner()


def run_experiment(config: ExperimentConfig, monitor: Optional[SurrogateGapMonitor] = None) -> ExperimentResult:
    return get_experiment_runner().run(config, monitor)


def sweep(
    base: ExperimentConfig,
    T_list: Sequence[int],
    d_list: Sequence[int],
    seeds: int = 1,
    workers: Optional[int] = None,
) -> List[SweepRow]:
    return get_experiment_runner().sweep(base, T_list, d_list, seeds, workers)


def gap_monitor_for(config: ExperimentConfig, strict: bool = True) -> SurrogateGapMonitor:
    """Monitor con el D y G del experimento"""
    feasible_set = build_feasible_set(config.problem)
    stream = build_stream(config.losses, feasible_set, config.run.horizon, stream_seed(config))
    return SurrogateGapMonitor(feasible_set, stream.gradient_bound, strict=strict)


# =============================================================================
# Semillas y estadisticas de barrido
# =============================================================================


def stable_hash(T: int, d: int) -> int:
    """Hash de (T, d) estable entre procesos y versiones de Python"""
    digest = hashlib.sha256(f"{int(T)},{int(d)}".encode("utf-8")).hexdigest()
    return int(digest[:8], 16)


def cell_seed(base_seed: int, T: int, d: int, replicate: int = 0) -> int:
    return int(base_seed) + stable_hash(T, d) + int(replicate)


def fit_slope(points: Iterable[Tuple[float, float]]) -> float:
    """Pendiente de minimos cuadrados de log(max(R, 1)) contra log(T)"""
    points = list(points)
    if len(points) < 3:
        raise ContractViolation(f"fit_slope requiere al menos 3 puntos, recibidos {len(points)}")
    horizons = np.array([float(T) for T, _ in points])
    if np.any(np.diff(horizons) <= 0):
        raise ContractViolation("los T de fit_slope deben ser estrictamente crecientes")
    if np.any(horizons <= 0):
        raise ContractViolation("los T de fit_slope deben ser positivos")
    regrets = np.array([max(float(R), 1.0) for _, R in points])
    slope, _ = np.polyfit(np.log(horizons), np.log(regrets), 1)
    return float(slope)


def median_regret(rows: Iterable[SweepRow]) -> Dict[Tuple[int, int], float]:
    """Mediana del regret por celda (T, d) sobre las replicas"""
    grouped: Dict[Tuple[int, int], List[float]] = {}
    for row in rows:
        grouped.setdefault((row.T, row.d_max), []).append(row.regret)
    return {cell: float(median(values)) for cell, values in sorted(grouped.items())}


def scaling_slope(rows: Iterable[SweepRow], d: Optional[int] = None) -> float:
    """fit_slope sobre las medianas de un barrido en T con d fijo"""
    medians = median_regret(rows)
    delays = sorted({cell[1] for cell in medians})
    if d is None:
        if len(delays) != 1:
            raise ContractViolation(f"el barrido tiene varios d {delays}; indique cual usar")
        d = delays[0]
    points = [(T, R) for (T, cell_d), R in medians.items() if cell_d == d]
    if not points:
        raise ContractViolation(f"el barrido no contiene celdas con d={d}")
    return fit_slope(sorted(points))
