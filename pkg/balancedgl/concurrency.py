import concurrent.futures
import contextvars
import functools
import threading
import typing

T = typing.TypeVar("T")
R = typing.TypeVar("R")

_executor = None  # type: typing.Optional[concurrent.futures.ThreadPoolExecutor]
_executor_lock = threading.Lock()


def _get_executor() -> concurrent.futures.ThreadPoolExecutor:
    global _executor
    with _executor_lock:
        if _executor is None:
            _executor = concurrent.futures.ThreadPoolExecutor(
                thread_name_prefix="balancedgl"
            )
        return _executor


def run_in_threadpool(
    func: typing.Callable[..., T], *args: typing.Any, **kwargs: typing.Any
) -> "concurrent.futures.Future[T]":
    # Ensure we run in the same context
    child = functools.partial(func, *args, **kwargs)
    context = contextvars.copy_context()
    return _get_executor().submit(context.run, child)


def gather(*funcs: typing.Callable[[], T]) -> typing.List[T]:
    """
    Run zero-argument callables concurrently and return their results in the
    order given. The first exception raised by any callable is re-raised.

    Must not be called from inside a callable that is itself being gathered,
    since the tasks share one pool.
    """
    futures = [run_in_threadpool(func) for func in funcs]
    return [future.result() for future in futures]


def map_in_processes(
    func: typing.Callable[[T], R], items: typing.Iterable[T], jobs: int = 1
) -> typing.List[R]:
    """
    Apply `func` to every item, in a process pool when `jobs > 1`.
    Results always come back in input order.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))
