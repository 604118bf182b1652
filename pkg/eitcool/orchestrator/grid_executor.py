"""Grid executor - evaluates independent grid points in a worker pool"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar, Union

from eitcool.errors import NumericError
from eitcool.utils import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class _Guarded:
    """Picklable wrapper that returns NumericError instances instead of raising"""

    def __init__(self, fn: Callable[[T], R]):
        self.fn = fn

    def __call__(self, item: T) -> Union[R, NumericError]:
        try:
            return self.fn(item)
        except NumericError as e:
            return e


class GridExecutor:
    """
    Maps a pure function over grid points, in parallel or sequentially.

    Results come back in input order whatever the worker count, so output
    files are identical for any --jobs value. A point whose evaluation raises
    NumericError yields the exception object in its slot; anything else
    propagates.
    """

    def __init__(self, jobs: Optional[int] = None, parallel: Optional[bool] = None):
        from eitcool.config import settings

        self.jobs = max(1, jobs if jobs is not None else settings.jobs)
        self.parallel = settings.parallel if parallel is None else parallel

    def map(
        self,
        fn: Callable[[T], R],
        items: Sequence[T],
        label: str = "grid"
    ) -> List[Union[R, NumericError]]:
        """
        Evaluate fn on every item.

        Args:
            fn: Module-level (picklable) function of one argument
            items: Grid points
            label: Name used in log events

        Returns:
            One result per item, in order; failed points hold their NumericError
        """
        items = list(items)
        if not items:
            return []

        guarded = _Guarded(fn)
        if self.parallel and self.jobs > 1 and len(items) > 1:
            logger.debug("executing_grid_parallel", label=label, points=len(items), jobs=self.jobs)
            results = self._execute_parallel(guarded, items)
        else:
            logger.debug("executing_grid_sequential", label=label, points=len(items))
            results = self._execute_sequential(guarded, items)

        failed = [i for i, r in enumerate(results) if isinstance(r, NumericError)]
        for i in failed:
            logger.warning("grid_point_failed", label=label, index=i, error=str(results[i]))
        return results

    def _execute_parallel(self, guarded: _Guarded, items: List[T]) -> List:
        """Fan out to a process pool; Executor.map keeps input order."""
        workers = min(self.jobs, len(items))
        chunksize = max(1, len(items) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(guarded, items, chunksize=chunksize))

    def _execute_sequential(self, guarded: _Guarded, items: List[T]) -> List:
        """Evaluate one by one in this process."""
        return [guarded(item) for item in items]
