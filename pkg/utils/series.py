import logging
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from config.constants import TRUNCATION
from config.messages import ERROR_MESSAGES
from utils.errors import ConvergenceError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    tail_bound: float
    n_terms: int
    last_two_j: int


def tail_bound(magnitudes: List[float]) -> Optional[float]:
    """Geometric bound on the remainder from the sup of the trailing term ratios.

    None means the trailing ratios do not certify convergence yet.
    """
    if not any(magnitudes):
        return 0.0
    ratios = []
    for previous, current in zip(magnitudes[:-1], magnitudes[1:]):
        if previous == 0.0:
            if current != 0.0:
                return None
            continue
        ratios.append(current / previous)
    if not ratios:
        return 0.0
    ratio = max(ratios)
    if ratio >= 1.0:
        return None
    return magnitudes[-1] * ratio / (1.0 - ratio)


def sum_power_series(term_fn: Callable[[np.ndarray], np.ndarray], step: int, tol: float,
                     max_two_j: Optional[int] = None, label: str = "series", x: float = 0.0) -> SeriesResult:
    window = TRUNCATION["ratio_window"]
    chunk = TRUNCATION["chunk_size"]
    total = 0j
    trailing: List[float] = []
    n_terms = 0
    two_j = 0
    while True:
        stop = two_j + chunk * step
        if max_two_j is not None:
            stop = min(stop, max_two_j + 1)
        grid = np.arange(two_j, stop, step)
        if grid.size:
            terms = np.asarray(term_fn(grid), dtype=complex)
            total += terms.sum()
            trailing = (trailing + list(np.abs(terms)))[-(window + 1):]
            n_terms += grid.size
            two_j = int(grid[-1]) + step
        if max_two_j is not None and two_j > max_two_j:
            return SeriesResult(complex(total), 0.0, n_terms, max_two_j)
        bound = tail_bound(trailing)
        if bound is not None and bound <= tol * max(abs(total), np.finfo(float).tiny):
            logger.debug(f"{label}: {n_terms} terms at x={x}, tail bound {bound:.2e}")
            return SeriesResult(complex(total), float(bound), n_terms, two_j - step)
        ratios = [b / a for a, b in zip(trailing[:-1], trailing[1:]) if a > 0]
        growing = bool(ratios) and min(ratios) >= 1.0
        if (growing and n_terms >= TRUNCATION["divergence_check_terms"]) or n_terms >= TRUNCATION["max_terms"]:
            ratio = max(ratios) if ratios else float("nan")
            raise ConvergenceError(ERROR_MESSAGES["no_convergence"].format(family=label, x=x, ratio=ratio))
