"""Oven scheduling: instances, validation, lower bounds, heuristic and exact solvers."""

from importlib import resources

from .bounds import BoundReport, bound_report
from .core import (
    DEFAULT_WEIGHTS,
    Batch,
    Instance,
    Job,
    Machine,
    ObjectiveReport,
    ObjectiveWeights,
    Schedule,
    objective,
)
from .errors import (
    BadParams,
    CapacityZero,
    DoesNotFit,
    MalformedSchedule,
    OSPError,
    TooLarge,
    Unschedulable,
    Unsupported,
)
from .formats import load_instance, parse_instance, save_instance
from .gen import GeneratorParams, generate
from .heuristic import construct
from .lp import export_ilp
from .solve import SolveResult, Status, branch_and_bound, brute_force
from .validate import Code, ViolationReport, validate_instance, validate_schedule

__version__ = "0.1.0"

EXAMPLES = ("example6", "example10")


def example_path(name: str):
    """Path of a bundled example instance (``example6`` or ``example10``)."""
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; choose from {EXAMPLES}")
    return resources.files(__name__).joinpath("data", f"{name}.json")


def load_example(name: str) -> Instance:
    return parse_instance(example_path(name).read_text(encoding="utf-8"))


__all__ = [
    "BadParams", "Batch", "BoundReport", "CapacityZero", "Code", "DEFAULT_WEIGHTS", "DoesNotFit",
    "EXAMPLES", "GeneratorParams", "Instance", "Job", "Machine", "MalformedSchedule", "OSPError",
    "ObjectiveReport", "ObjectiveWeights", "Schedule", "SolveResult", "Status", "TooLarge",
    "Unschedulable", "Unsupported", "ViolationReport", "bound_report", "branch_and_bound",
    "brute_force", "construct", "example_path", "export_ilp", "generate", "load_example",
    "load_instance", "objective", "save_instance", "validate_instance", "validate_schedule",
]
