# coding: utf-8
"""
Ordered worker pool shared by the Monte Carlo engine and the sweeps.

.. versionadded:: 0.1.0
"""
import logging

from typing import Callable, List, Optional, Sequence, TypeVar

import joblib as jl

from .config import threads

__all__ = ['resolve_n_jobs', 'parallel_map']

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def resolve_n_jobs(n_jobs: Optional[int] = None) -> int:
    """
    Parameters
    ----------
    n_jobs : int, optional
        Requested number of workers.  If ``None``, the value of the
        ``POLYSLICE_THREADS`` environment variable is used (see
        :func:`polyslice.config.threads`).

    Returns
    -------
    int
        Number of workers, at least one.
    """
    if n_jobs is None:
        return threads()
    if n_jobs < 1:
        raise ValueError(f'Number of workers must be positive (got {n_jobs}).')
    return int(n_jobs)


def parallel_map(func: Callable[[T], R], items: Sequence[T],
                 n_jobs: Optional[int] = None) -> List[R]:
    """
    Apply ``func`` to each item, possibly in parallel.

    Results are always returned in the order of ``items``, so reductions
    over the result list do not depend on the number of workers.

    Parameters
    ----------
    func : callable
        Pure function of one item.
    items : sequence
        Work items.
    n_jobs : int, optional
        Number of workers (see :func:`resolve_n_jobs`).

    Returns
    -------
    list
        ``[func(item) for item in items]``.
    """
    items = list(items)
    n_jobs = resolve_n_jobs(n_jobs)
    if n_jobs == 1 or len(items) < 2:
        return [func(item) for item in items]
    logger.debug('Mapping %d items over %d threads.', len(items), n_jobs)
    # Threads, so items and `func` need not be picklable.
    return jl.Parallel(n_jobs=n_jobs, prefer='threads')(jl.delayed(func)(item)
                                                        for item in items)
