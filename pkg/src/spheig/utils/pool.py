from collections.abc import Callable, Iterable
from functools import partial

import anyio
import asyncer

from spheig.settings import settings


async def _gather[T, R](fn: Callable[[T], R], items: list[T], limit: int) -> list[R]:
    limiter = anyio.CapacityLimiter(limit)
    async with asyncer.create_task_group() as tg:
        soon = [tg.soonify(asyncer.asyncify(fn, limiter=limiter))(item) for item in items]
    return [s.value for s in soon]


def _first_leaf(err: BaseException) -> BaseException:
    while isinstance(err, BaseExceptionGroup) and err.exceptions:
        err = err.exceptions[0]
    return err


def map_concurrent[T, R](
    fn: Callable[[T], R], items: Iterable[T], limit: int | None = None
) -> list[R]:
    """Run blocking ``fn`` over ``items`` on worker threads, results in input order.

    At most ``limit`` (default ``settings.threads``) calls run at once. The first
    failure is re-raised unwrapped.
    """
    items = list(items)
    if not items:
        return []
    limit = settings.threads if limit is None else limit
    if limit <= 1 or len(items) == 1:
        return [fn(item) for item in items]
    try:
        return anyio.run(partial(_gather, fn, items, limit))
    except BaseExceptionGroup as eg:
        raise _first_leaf(eg) from None
