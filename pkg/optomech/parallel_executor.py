"""
Parallel evaluation layer for grid points and optimizer starts.

Work items are independent pure evaluations. They are dispatched to a thread
pool from an asyncio loop and collected back in submission order, so the
results never depend on the schedule.
"""

import asyncio
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence


logger = logging.getLogger(__name__)


@dataclass
class ExecutionResult:
    """Outcome of one work item."""
    index: int
    value: Any = None
    success: bool = True
    error: Optional[str] = None
    exception: Optional[BaseException] = None
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "success": self.success,
            "error": self.error,
            "elapsed": self.elapsed,
        }


def describe_error(error: BaseException) -> str:
    """`ExceptionName: message`, as written to sweep error columns."""
    return f"{type(error).__name__}: {error}"


class ParallelExecutor:
    """
    Runs a function over a list of items concurrently.

    Features:
    - Ordered results regardless of completion order
    - Per-item exception capture (one failure never aborts the batch)
    - Sequential fast path for a single worker
    """

    def __init__(self, max_workers: int = 1):
        """
        Initialize the parallel executor.

        Args:
            max_workers: Size of the thread pool; 1 evaluates in the calling thread
        """
        if max_workers < 1:
            raise ValueError(f"max_workers must be >= 1, got {max_workers}")
        self.max_workers = max_workers

    @staticmethod
    def _run_one(fn: Callable[[Any], Any], index: int, item: Any) -> ExecutionResult:
        start = time.time()
        try:
            value = fn(item)
            return ExecutionResult(index=index, value=value, elapsed=time.time() - start)
        except Exception as e:
            logger.warning(f"Item {index} failed: {describe_error(e)}")
            return ExecutionResult(
                index=index,
                success=False,
                error=describe_error(e),
                exception=e,
                elapsed=time.time() - start,
            )

    async def execute_parallel(self, fn: Callable[[Any], Any], items: Sequence[Any]) -> List[ExecutionResult]:
        """
        Evaluate fn on every item in a thread pool.

        Args:
            fn: Function of one item
            items: Work items

        Returns:
            One ExecutionResult per item, in item order
        """
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            tasks = [
                loop.run_in_executor(pool, self._run_one, fn, index, item)
                for index, item in enumerate(items)
            ]
            results = await asyncio.gather(*tasks)
        return list(results)

    def map_ordered(self, fn: Callable[[Any], Any], items: Sequence[Any]) -> List[ExecutionResult]:
        """Synchronous entry point: evaluates all items and returns results in order."""
        items = list(items)
        start = time.time()
        if self.max_workers == 1 or len(items) <= 1:
            results = [self._run_one(fn, index, item) for index, item in enumerate(items)]
        else:
            results = asyncio.run(self.execute_parallel(fn, items))

        failed = sum(1 for result in results if not result.success)
        logger.debug(
            f"Parallel execution completed: {len(results) - failed} successful, "
            f"{failed} failed, total time: {time.time() - start:.2f}s"
        )
        return results
