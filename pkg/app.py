# Import numerics libraries
import numpy as np

# Import FastAPI libraries
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field, model_validator

# Import system libraries
import dataclasses
import logging
import math
from typing import List, Literal, Optional

from dotenv import load_dotenv
import uvicorn

# Import simulator libraries
from swipt.antenna_selection import STRATEGIES, SelectionConfig, SelectionOutcome, SelectionStrategyFactory
from swipt.channel import ChannelMatrix, EigenChannels, eigen_channels
from swipt.errors import NonPositivePowerError, SwiptError
from swipt.results import EvaluatedAllocation, SolveResult
from swipt.solvers import InnerSolverFactory
from swipt.system_model import screen_parameters
from util.config_manager import QosModel, SolverConfigModel, SystemParamsModel

logger = logging.getLogger(__name__)

AlgorithmName = Literal["dm_cvx", "jeapa", "moo_lc"]


class ChannelInput(BaseModel):
    model_config = ConfigDict(extra="forbid")

    real: List[List[float]]
    imag: Optional[List[List[float]]] = None

    def build(self) -> ChannelMatrix:
        real = np.asarray(self.real, dtype=float)
        imag = np.zeros_like(real) if self.imag is None else np.asarray(self.imag, dtype=float)
        if imag.shape != real.shape:
            raise ValueError(f"imag part has shape {imag.shape}, real part {real.shape}")
        return ChannelMatrix(real + 1j * imag)


class SolveInput(BaseModel):
    """One fixed-antenna-set instance, given either as eigen gains or as a channel matrix."""

    model_config = ConfigDict(extra="forbid")

    gains: Optional[List[float]] = None
    channel: Optional[ChannelInput] = None
    n_active: Optional[int] = Field(None, ge=1)
    params: SystemParamsModel = Field(default_factory=SystemParamsModel)
    qos: QosModel = Field(default_factory=QosModel)
    algorithm: AlgorithmName = "jeapa"
    solver_cfg: SolverConfigModel = Field(default_factory=SolverConfigModel)
    include_trace: bool = False

    @model_validator(mode="after")
    def _one_channel_description(self):
        if (self.gains is None) == (self.channel is None):
            raise ValueError("give exactly one of gains or channel")
        return self


class SelectInput(BaseModel):
    model_config = ConfigDict(extra="forbid")

    channel: ChannelInput
    params: SystemParamsModel = Field(default_factory=SystemParamsModel)
    qos: QosModel = Field(default_factory=QosModel)
    strategy: Literal["fixed_full", "exhaustive", "frobenius"] = "frobenius"
    algorithm: AlgorithmName = "jeapa"
    solver_cfg: SolverConfigModel = Field(default_factory=SolverConfigModel)
    max_exhaustive_antennas: int = Field(12, ge=1)


class SolveInvocation(BaseModel):
    input: SolveInput


class SelectInvocation(BaseModel):
    input: SelectInput


def _clean(value):
    """JSON-safe copy: non-finite floats become null."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def evaluated_payload(evaluated: Optional[EvaluatedAllocation]) -> Optional[dict]:
    if evaluated is None:
        return None
    return {
        "assign": evaluated.allocation.assign.tolist(),
        "power": evaluated.allocation.power.tolist(),
        "feasible": evaluated.feasible,
        "metrics": evaluated.metrics.as_dict(),
    }


def result_payload(result: Optional[SolveResult], include_trace: bool = False) -> Optional[dict]:
    if result is None:
        return None
    payload = {
        "algorithm": result.algorithm,
        "converged": result.converged,
        "feasible": result.feasible,
        "ee": result.ee,
        "rounding_drop": result.rounding_drop,
        "iterations": dict(result.iterations),
        "relaxed": evaluated_payload(result.relaxed),
        "rounded": evaluated_payload(result.rounded),
    }
    if include_trace:
        payload["trace"] = [dataclasses.asdict(row) for row in result.trace]
    return _clean(payload)


def selection_payload(outcome: SelectionOutcome) -> dict:
    return _clean({
        "strategy": outcome.strategy,
        "inner_solver": outcome.inner_solver,
        "evaluations": outcome.evaluations,
        "best_set": list(outcome.best_set.indices),
        "best_n": outcome.best_n,
        "ee": outcome.ee,
        "per_n": [
            {"n": e.antenna_set.size, "antenna_set": list(e.antenna_set.indices), "ee": e.ee,
             "feasible": e.feasible, "error": e.error}
            for e in outcome.per_n_table
        ],
        "result": result_payload(outcome.best_result),
    })


def solve_instance(request: SolveInput) -> dict:
    """Run one inner solver on the instance described by ``request``."""
    params = request.params.build()
    if request.channel is not None:
        h = request.channel.build()
        lam = eigen_channels(h)
        params = params.with_updates(n_rx=h.n_rx, n_tx=h.n_tx)
        n_active = h.n_rx
    else:
        lam = EigenChannels.from_gains(request.gains)
        n_active = request.n_active or params.n_rx
    screen_parameters(params, lam)
    solver = InnerSolverFactory.create_solver(request.algorithm, request.solver_cfg.build())
    result = solver.solve(lam, params, request.qos.build(), n_active)
    logger.info("solved %d channels with %s: ee=%s", lam.count, request.algorithm, result.ee)
    return result_payload(result, request.include_trace)


def select_instance(request: SelectInput) -> dict:
    h = request.channel.build()
    params = request.params.build().with_updates(n_rx=h.n_rx, n_tx=h.n_tx)
    outcome = SelectionStrategyFactory.select(
        request.strategy, h, params, request.qos.build(), request.algorithm,
        request.solver_cfg.build(), SelectionConfig(request.max_exhaustive_antennas))
    return selection_payload(outcome)


def _http_error(exc: Exception) -> HTTPException:
    # bad input and rejected parameters are the caller's fault
    if isinstance(exc, (ValueError, NonPositivePowerError)):
        return HTTPException(status_code=422, detail=str(exc))
    return HTTPException(status_code=500, detail=f"Solver failure: {exc}")


class SwiptSolverAPIApp:
    def __init__(self):
        self._load_env_variables()
        self.app = self._create_fastapi_app()

        # Setup routes
        self._add_routes()

    def _load_env_variables(self):
        load_dotenv()

    def _create_fastapi_app(self):
        return FastAPI(
            title="SWIPT EE Solver API",
            description="Energy-efficiency resource allocation and antenna selection for SWIPT MIMO links",
            version="0.1.0",
        )

    async def solve_endpoint(self, request: SolveInput):
        """Handle single-instance solve requests"""
        try:
            return {"output": solve_instance(request)}
        except (SwiptError, ArithmeticError, ValueError) as e:
            logger.warning("solve request failed: %s", e)
            raise _http_error(e)

    async def select_endpoint(self, request: SelectInput):
        """Handle antenna selection requests"""
        try:
            return {"output": select_instance(request)}
        except (SwiptError, ArithmeticError, ValueError) as e:
            logger.warning("select request failed: %s", e)
            raise _http_error(e)

    def _add_routes(self):
        """Add solver routes"""

        @self.app.post("/solve/invoke")
        async def solve_invoke(invocation: SolveInvocation):
            return await self.solve_endpoint(invocation.input)

        @self.app.post("/select/invoke")
        async def select_invoke(invocation: SelectInvocation):
            return await self.select_endpoint(invocation.input)

        # Health check endpoint
        @self.app.get("/health")
        async def health_check():
            return {"status": "healthy"}

        # List available solvers endpoint
        @self.app.get("/solvers")
        async def list_solvers():
            return {
                "algorithms": InnerSolverFactory.available(),
                "selection_strategies": list(STRATEGIES),
            }

    def run(self, host: str = "localhost", port: int = 8000):
        uvicorn.run(self.app, host=host, port=port)


if __name__ == "__main__":
    api = SwiptSolverAPIApp()
    api.run()
