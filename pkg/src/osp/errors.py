"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class OSPError(Exception):
    """Base class for toolkit errors."""


class MalformedSchedule(OSPError):
    """A job is missing, duplicated, or a batch references unknown ids."""


class DoesNotFit(OSPError):
    """A batch admits no availability interval before the horizon."""


class Unschedulable(OSPError):
    """The heuristic could not place every job.

    ``partial`` holds the schedule built so far.
    """

    def __init__(self, job: int, partial):
        super().__init__(f"job {job} could not be scheduled")
        self.job = job
        self.partial = partial


class TooLarge(OSPError):
    """Instance exceeds the brute-force size guard."""


class CapacityZero(OSPError):
    """Batch capacity below one."""


class BadParams(OSPError):
    """Invalid generator parameters."""


class Unsupported(OSPError):
    """Model cannot be represented (e.g. coefficient overflow)."""
