from typing import Callable, Iterable, List, Sequence, TypeVar

import numpy as np
from tqdm import tqdm
from tqdm.contrib.concurrent import process_map, thread_map

T = TypeVar("T")
R = TypeVar("R")

# Stream tag for drawing the samples of an uncertain test object.
QUERY_STREAM = 2**32 - 1


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """
    Independent generator for (seed, *keys); identical keys give identical streams
    regardless of the order in which streams are requested.
    """
    return np.random.default_rng([int(seed), *(int(key) for key in keys)])


def parallel_map(
    fn: Callable[[T], R],
    items: Sequence[T],
    jobs: int = 1,
    progress: bool = False,
    desc: str = "",
    threads: bool = False,
) -> List[R]:
    """
    Map `fn` over `items` keeping input order; `jobs > 1` fans out to processes
    (or threads when `fn` cannot be pickled).
    """
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in tqdm(items, desc=desc, disable=not progress)]
    mapper = thread_map if threads else process_map
    chunksize = max(1, len(items) // (jobs * 4))
    kwargs = {"max_workers": jobs, "desc": desc, "disable": not progress}
    if not threads:
        kwargs["chunksize"] = chunksize
    return list(mapper(fn, items, **kwargs))


def mean_std(values: Iterable[float]) -> tuple:
    values = np.asarray(list(values), dtype=np.float64)
    return float(values.mean()), float(values.std())


def format_time(seconds: float) -> str:
    """
    Formats time in seconds to HH:MM:SS:mm format.
    """
    hours = int(seconds // 3600)
    minutes = int((seconds % 3600) // 60)
    seconds = seconds % 60
    full_seconds = int(seconds)
    milliseconds = int((seconds - full_seconds) * 100)

    if hours > 0:
        return f"{hours:02}:{minutes:02}:{full_seconds:02}:{milliseconds:02}"
    return f"{minutes:02}:{full_seconds:02}:{milliseconds:02}"
