import logging
from collections.abc import Sequence

import ray

from common.analysis import convergence_row, derivative_row, voronovskaja_row
from common.bn_rules import get_bn_rule
from common.function_model.taylor import TaylorFunction
from common.logger import setup_logger
from common.settings import get_settings, get_structured_logger
from common.types import ConvergenceRecord, OperatorConfig, SweepKind

logger = logging.getLogger(__name__)
structured_logger = get_structured_logger()
settings = get_settings()


def sweep_row(
    kind: SweepKind,
    f: TaylorFunction,
    cfg: OperatorConfig,
    r: float,
    r1: float | None = None,
    order: int = 0,
    n0: int | None = None,
) -> ConvergenceRecord:
    if kind == SweepKind.CONVERGE:
        return convergence_row(f, cfg, r, n0=n0)
    if kind == SweepKind.VORONOVSKAJA:
        return voronovskaja_row(f, cfg, r, n0=n0)
    if kind == SweepKind.DERIVATIVE:
        return derivative_row(f, cfg, r, r1, order, n0=n0)
    msg = f"Unknown sweep kind: {kind}"
    raise ValueError(msg)


# each row is independent, so a failed task is not retried
remote_sweep_row = ray.remote(max_retries=0)(sweep_row)


class SweepService:
    """Runs one row function per n and returns the rows ordered by n.

    With a single worker rows run in-process; otherwise each n becomes a ray task.
    """

    def __init__(self, workers: int | None = None):
        self.workers = settings.SWEEP_WORKERS if workers is None else workers

    def run(
        self,
        kind: SweepKind,
        f: TaylorFunction,
        ns: Sequence[int],
        bn_rule: str | float,
        r: float,
        r1: float | None = None,
        order: int = 0,
        n0: int | None = None,
    ) -> list[ConvergenceRecord]:
        get_bn_rule(bn_rule).check_admissible(list(ns))
        configs = [OperatorConfig(n=n, bn_rule=bn_rule) for n in ns]
        structured_logger.info(
            "Starting {kind} sweep of {label} over {count} values of n with {workers} worker(s)",
            kind=str(kind),
            label=f.label,
            count=len(configs),
            workers=self.workers,
        )
        if self.workers <= 1:
            records = [sweep_row(kind, f, cfg, r, r1, order, n0) for cfg in configs]
        else:
            self._ensure_ray()
            futures = [remote_sweep_row.remote(kind, f, cfg, r, r1, order, n0) for cfg in configs]
            records = ray.get(futures)
        records = sorted(records, key=lambda record: record.n)
        for record in records:
            if not record.passed:
                structured_logger.warning(
                    "{kind} row n={n} exceeds its bound: error={error} bound={bound}",
                    kind=str(kind),
                    n=record.n,
                    error=record.error,
                    bound=record.bound,
                )
        return records

    def _ensure_ray(self) -> None:
        if ray.is_initialized():
            return
        ray.init(
            log_to_driver=True,
            num_cpus=self.workers,
            include_dashboard=False,
            runtime_env={"worker_process_setup_hook": setup_logger},
        )
        logger.info("Initialised ray with %d CPUs for sweeps", self.workers)
