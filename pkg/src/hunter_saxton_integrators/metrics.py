import os

from prometheus_client import REGISTRY, Counter, write_to_textfile

metrics_prefix = os.getenv("HS_INTEGRATORS_METRICS_PREFIX", "hs_integrators")

STEP_COUNT = Counter(
    "steps_total",
    "Total number of time steps taken",
    ["problem", "scheme"],
    namespace=metrics_prefix,
)

SOLVER_ITERATIONS = Counter(
    "solver_iterations_total",
    "Total number of nonlinear solver iterations",
    ["method"],
    namespace=metrics_prefix,
)

SOLVER_FAILURES = Counter(
    "solver_failures_total",
    "Total number of failed nonlinear solves",
    ["reason"],
    namespace=metrics_prefix,
)


def write_metrics(path) -> None:
    """
    Write every registered metric to ``path`` in the Prometheus text format.
    """
    write_to_textfile(str(path), REGISTRY)
