"""
Wall-clock budgets shared by the two halves of the entailment race.
"""
import threading
import time

from .exceptions import BudgetExpired


class Budget:
    """Deadline plus a cancellation flag the competing task can raise"""

    def __init__(self, seconds=None, cancel=None):
        self.deadline = None if seconds is None else time.monotonic() + seconds
        self.cancel = cancel or threading.Event()

    @classmethod
    def unlimited(cls):
        return cls(None)

    def share(self, seconds):
        """A budget with its own deadline that obeys the same cancellation"""
        child = Budget(seconds, self.cancel)
        if self.deadline is not None and (child.deadline is None or child.deadline > self.deadline):
            child.deadline = self.deadline
        return child

    def remaining(self):
        if self.deadline is None:
            return float("inf")
        return max(0.0, self.deadline - time.monotonic())

    def expired(self):
        if self.cancel.is_set():
            return True
        return self.deadline is not None and time.monotonic() >= self.deadline

    def check(self):
        if self.cancel.is_set():
            raise BudgetExpired("cancelled")
        if self.deadline is not None and time.monotonic() >= self.deadline:
            raise BudgetExpired("time budget exhausted")
