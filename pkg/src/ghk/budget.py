"""Work and memory guards shared by the heavy kernels.

Brute-force correlation sums grow like ``N**((k+1)*d)``; rather than letting a
mistyped size run for hours, every brute entry point estimates its lattice
visit count up front and refuses anything above the configured budget.
"""

from __future__ import annotations

import math

DEFAULT_WORK_BUDGET = 1_000_000_000
DEFAULT_MEMORY_BUDGET_BYTES = 1 << 28

_memory_budget_bytes = DEFAULT_MEMORY_BUDGET_BYTES


class BudgetExceededError(RuntimeError):
    """An operation would exceed the configured work or memory budget."""

    def __init__(self, kind, needed, budget):
        self.kind = kind
        self.needed = needed
        self.budget = budget
        super().__init__(
            f"{kind} budget exceeded: needs {needed:,} but budget is {budget:,}"
        )


def set_memory_budget(n_bytes):
    """Set the global allocation budget for grid values, in bytes."""
    global _memory_budget_bytes
    if n_bytes <= 0:
        raise ValueError("memory budget must be positive")
    _memory_budget_bytes = int(n_bytes)


def memory_budget():
    return _memory_budget_bytes


def check_allocation(n_elements):
    """Validate an f64 allocation of ``n_elements`` against the memory budget."""
    needed = 8 * int(n_elements)
    if needed > _memory_budget_bytes:
        raise BudgetExceededError("memory", needed, _memory_budget_bytes)


def check_work(n_visits, work_budget=None):
    """Validate an estimated lattice visit count against the work budget.

    ``work_budget=None`` selects :data:`DEFAULT_WORK_BUDGET`.
    """
    budget = DEFAULT_WORK_BUDGET if work_budget is None else int(work_budget)
    n = int(n_visits)
    if n > budget:
        raise BudgetExceededError("work", n, budget)
    return n


def brute_gowers_work(extents, k):
    """Visit-count model for the brute k-th correlation sum: ``N^d * (2N-1)^(kd)``."""
    work = 1
    for n in extents:
        work *= int(n) * (2 * int(n) - 1) ** k
    return work


def brute_dual_work(extents, k, out_extents=None):
    """Visit-count model for the brute cubic convolution product field.

    Per axis the admissible shift range has ``n + out_n - 1`` offsets (``2N-1``
    when the output box coincides with the input box).
    """
    out = extents if out_extents is None else out_extents
    work = math.prod(int(n) for n in out)
    for n, m in zip(extents, out):
        work *= (int(n) + int(m) - 1) ** k
    return work


def fft_work(lengths):
    """Transform cost model: ``M^d * log2(M^d)`` for per-axis lengths M."""
    total = math.prod(int(m) for m in lengths)
    return int(total * max(1, math.ceil(math.log2(max(total, 2)))))


def rec_gowers_work(extents, k):
    """Cost model for the shift recursion: ``(2N-1)^((k-2)d)`` padded
    transforms of length 2N per axis."""
    shifts = math.prod((2 * int(n) - 1) for n in extents) ** max(int(k) - 2, 0)
    return shifts * fft_work([2 * int(n) for n in extents])


def spectral_work(extents, factor=3):
    """Cost model for the padded-transform norm route."""
    return fft_work([factor * int(n) for n in extents])
