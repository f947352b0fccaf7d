import numpy as np


class CompensatedSum:
    """Element-wise Neumaier summation of a stream of vectors."""

    __slots__ = ("_sum", "_comp")

    def __init__(self, size: int):
        self._sum = np.zeros(size)
        self._comp = np.zeros(size)

    def add(self, x) -> None:
        s = self._sum
        t = s + x
        big = np.abs(s) >= np.abs(x)
        self._comp += np.where(big, (s - t) + x, (x - t) + s)
        self._sum = t

    @property
    def value(self) -> np.ndarray:
        return self._sum + self._comp
