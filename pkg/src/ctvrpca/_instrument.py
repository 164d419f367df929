"""Operation counters used to check the per-iteration cost structure.

Counting is off unless a :func:`count_ops` block is active in the current
context, so solver runs in other threads or tasks are never mixed together.
"""

from collections import Counter
from contextlib import contextmanager
from contextvars import ContextVar

_active: ContextVar = ContextVar("ctvrpca_op_counter", default=None)


def bump(name, n=1):
    counter = _active.get()
    if counter is not None:
        counter[name] += n


@contextmanager
def count_ops():
    """Collect ``svd``, ``fft_forward`` and ``fft_inverse`` counts.

    >>> with count_ops() as ops:
    ...     pass
    >>> dict(ops)
    {}
    """
    counter = Counter()
    token = _active.set(counter)
    try:
        yield counter
    finally:
        _active.reset(token)
