"""
================================================================================
                         MODELOS DE DATOS
================================================================================
"""

import re
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator


class SetKind(str, Enum):
    """Conjuntos factibles soportados"""
    BOX = "box"
    L2_BALL = "l2ball"
    SIMPLEX = "simplex"


class StreamKind(str, Enum):
    """Adversarios soportados"""
    LINEAR = "linear"
    QUADRATIC = "quadratic"


class DelayKind(str, Enum):
    """Variantes de retraso"""
    FIXED = "fixed"
    UNIFORM = "uniform"
    BURSTY = "bursty"


class Algorithm(str, Enum):
    """Algoritmos ejecutables por el harness"""
    DOFW_CONVEX = "dofw_convex"
    DOFW_SC = "dofw_sc"
    DELAYED_OGD = "delayed_ogd"
    OFW_REFERENCE = "ofw_reference"
    OFW_SC_REFERENCE = "ofw_sc_reference"


class EtaRule(str, Enum):
    GENERAL = "general"
    STRONGLY_CONVEX_SET = "strongly_convex_set"
    EXPLICIT = "explicit"


class OGDStep(str, Enum):
    CONSTANT = "constant"
    STRONGLY_CONVEX = "strongly_convex"


_EXPLICIT_ETA = re.compile(r"^explicit\(\s*([^)]+?)\s*\)$")


def _split_vector(value):
    if isinstance(value, str):
        parts = [part.strip() for part in value.split(",") if part.strip()]
        return [float(part) for part in parts]
    if isinstance(value, (int, float)):
        return [float(value)]
    return value


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)


class SetSpec(_Section):
    """Seccion [problem]"""
    kind: SetKind = Field(..., alias="set")
    dimension: int = Field(..., gt=0)
    radius: float = Field(1.0, gt=0)
    center: Optional[List[float]] = None
    lo: Optional[List[float]] = None
    hi: Optional[List[float]] = None
    scale: float = Field(1.0, gt=0)

    @model_validator(mode="before")
    @classmethod
    def broadcast_vectors(cls, data):
        # escalares se replican a la dimension; listas "a, b, c" se separan
        if not isinstance(data, dict):
            return data
        try:
            dimension = int(data.get("dimension"))
        except (TypeError, ValueError):
            return data
        data = dict(data)
        for name, default in (("center", 0.0), ("lo", -1.0), ("hi", 1.0)):
            values = _split_vector(data.get(name, default))
            if isinstance(values, list) and len(values) == 1:
                values = values * dimension
            data[name] = values
        return data

    @model_validator(mode="after")
    def check_vectors(self) -> "SetSpec":
        for name in ("center", "lo", "hi"):
            values = getattr(self, name)
            if values is not None and len(values) != self.dimension:
                raise ValueError(
                    f"{name} tiene {len(values)} componentes, se esperaban {self.dimension}"
                )
        if self.kind is SetKind.BOX and any(l >= h for l, h in zip(self.lo, self.hi)):
            raise ValueError("box requiere lo_i < hi_i en todas las coordenadas")
        return self


class StreamSpec(_Section):
    """Seccion [losses]"""
    kind: StreamKind
    gradient_bound: float = Field(1.0, alias="G", gt=0)
    beta: float = Field(1.0, ge=0)
    seed: Optional[int] = None

    @property
    def strong_convexity(self) -> float:
        return self.beta if self.kind is StreamKind.QUADRATIC else 0.0

    # solo corren si la clave aparece en el archivo
    @field_validator("gradient_bound")
    @classmethod
    def gradient_bound_only_for_linear(cls, value, info: ValidationInfo):
        if info.data.get("kind") is StreamKind.QUADRATIC:
            raise ValueError("G no aplica a perdidas quadratic (se deriva como beta * D)")
        return value

    @field_validator("beta")
    @classmethod
    def beta_only_for_quadratic(cls, value, info: ValidationInfo):
        if info.data.get("kind") is StreamKind.LINEAR:
            raise ValueError("beta no aplica a perdidas linear")
        return value

    @model_validator(mode="after")
    def check_beta(self) -> "StreamSpec":
        if self.kind is StreamKind.QUADRATIC and not self.beta > 0:
            raise ValueError("losses de tipo quadratic requieren beta > 0")
        return self


class DelaySpec(_Section):
    """Seccion [delays]"""
    kind: DelayKind = DelayKind.FIXED
    delay: int = Field(1, ge=1)
    d_max: Optional[int] = Field(None, ge=1)
    period: Optional[int] = Field(None, ge=1)
    burst_delay: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = None

    @model_validator(mode="after")
    def check_variant(self) -> "DelaySpec":
        if self.kind is DelayKind.UNIFORM and self.d_max is None:
            raise ValueError("delays de tipo uniform requieren d_max")
        if self.kind is DelayKind.BURSTY and (self.period is None or self.burst_delay is None):
            raise ValueError("delays de tipo bursty requieren period y burst_delay")
        return self

    def with_max_delay(self, d: int) -> "DelaySpec":
        """Copia con el parametro de escala del retraso fijado a d"""
        field_name = {
            DelayKind.FIXED: "delay",
            DelayKind.UNIFORM: "d_max",
            DelayKind.BURSTY: "burst_delay",
        }[self.kind]
        return self.model_copy(update={field_name: int(d)})


class RunSpec(_Section):
    """Seccion [run]"""
    algorithm: Algorithm
    horizon: int = Field(..., alias="T", gt=0)
    eta_rule: EtaRule = EtaRule.GENERAL
    eta: Optional[float] = Field(None, gt=0)
    beta: Optional[float] = Field(None, gt=0)
    y1: Optional[List[float]] = None
    ogd_step: OGDStep = OGDStep.CONSTANT
    base_seed: int = 0
    output: Optional[str] = None

    @field_validator("y1", mode="before")
    @classmethod
    def split_y1(cls, value):
        return _split_vector(value)

    @model_validator(mode="before")
    @classmethod
    def parse_explicit_eta(cls, data):
        if isinstance(data, dict):
            rule = data.get("eta_rule")
            if isinstance(rule, str):
                match = _EXPLICIT_ETA.match(rule.strip())
                if match:
                    if "eta" in data:
                        raise ValueError("eta dado dos veces: en eta_rule = explicit(...) y en eta")
                    data = dict(data)
                    data["eta_rule"] = EtaRule.EXPLICIT.value
                    data["eta"] = match.group(1)
            elif rule is None and "eta" in data:
                # `eta = <valor>` sin regla equivale a explicit(<valor>)
                data = dict(data)
                data["eta_rule"] = EtaRule.EXPLICIT.value
        return data

    @field_validator("eta")
    @classmethod
    def eta_needs_explicit_rule(cls, value, info: ValidationInfo):
        rule = info.data.get("eta_rule")
        if rule is not None and rule is not EtaRule.EXPLICIT:
            raise ValueError(f"eta solo aplica con eta_rule = explicit, no con {rule.value}")
        return value

    @model_validator(mode="after")
    def check_eta(self) -> "RunSpec":
        if self.eta_rule is EtaRule.EXPLICIT and self.eta is None:
            raise ValueError("eta_rule explicit requiere un valor: explicit(<eta>) o eta = <valor>")
        return self


class ExperimentConfig(_Section):
    """Configuracion completa de un experimento"""
    problem: SetSpec
    losses: StreamSpec
    delays: DelaySpec = DelaySpec()
    run: RunSpec

    @model_validator(mode="after")
    def check_compatibility(self) -> "ExperimentConfig":
        algorithm = self.run.algorithm
        stream_beta = self.losses.strong_convexity
        needs_beta = algorithm in (Algorithm.DOFW_SC, Algorithm.OFW_SC_REFERENCE) or (
            algorithm is Algorithm.DELAYED_OGD and self.run.ogd_step is OGDStep.STRONGLY_CONVEX
        )
        if needs_beta:
            if not stream_beta > 0:
                raise ValueError(
                    f"{algorithm.value} requiere perdidas fuertemente convexas (beta > 0), "
                    f"el flujo {self.losses.kind.value} tiene beta = 0"
                )
            if self.run.beta is not None and self.run.beta > stream_beta:
                raise ValueError(
                    f"run.beta = {self.run.beta} excede el modulo del flujo ({stream_beta})"
                )
        if self.run.y1 is not None and len(self.run.y1) != self.problem.dimension:
            raise ValueError(
                f"y1 tiene {len(self.run.y1)} componentes, se esperaban {self.problem.dimension}"
            )
        return self

    @property
    def solver_beta(self) -> float:
        """beta entregado al solver: run.beta o el modulo del flujo"""
        return self.run.beta if self.run.beta is not None else self.losses.strong_convexity

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return self.model_copy(update={"run": self.run.model_copy(update={"base_seed": int(seed)})})

    def with_cell(self, horizon: int, d: int, seed: int) -> "ExperimentConfig":
        """Copia para una celda (T, d) de un barrido"""
        run = self.run.model_copy(update={"horizon": int(horizon), "base_seed": int(seed)})
        return self.model_copy(update={"run": run, "delays": self.delays.with_max_delay(d)})


class RoundLog(BaseModel):
    """Registro de una ronda"""
    t: int
    loss: float
    cum_loss: float
    arrivals: int
    tau: int
    cum_regret: float = 0.0


class ExperimentResult(BaseModel):
    """Resultado de un experimento"""
    config: ExperimentConfig
    rounds: List[RoundLog] = []
    regret: float
    cumulative_loss: float
    offline_total: float
    comparator_method: str
    certified_gap: float = 0.0
    max_delay: int
    undelivered: int = 0
    regret_bound: Optional[float] = None
    gap_checks: int = 0
    gap_violations: int = 0
    wall_ms: float = 0.0


class SweepRow(BaseModel):
    """Fila del CSV de barrido"""
    T: int
    d_max: int
    algo: str
    set: str
    seed: int
    regret: float
    wall_ms: float
