"""Frequency index sets Z_{d,R} and their fixed enumeration"""

from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import InvalidArgumentError


@lru_cache(maxsize=64)
def _frequency_table(d: int, R: int) -> np.ndarray:
    axis = np.arange(-R, R + 1)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    table = np.stack([m.ravel() for m in mesh], axis=1)
    table.flags.writeable = False
    return table


class FrequencyGrid(BaseModel):
    """The index set {xi in Z^d : |xi|_inf <= R} in row-major order

    Each axis runs from -R to R, the last axis varies fastest. Reversing
    the flat enumeration maps xi to -xi, which is what the Hermitian
    symmetry helpers rely on.
    """

    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=1, le=3, description="Spatial dimension")
    R: int = Field(ge=0, description="Frequency cutoff")

    @property
    def side(self) -> int:
        return 2 * self.R + 1

    @property
    def size(self) -> int:
        return self.side**self.d

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.side,) * self.d

    def frequencies(self) -> np.ndarray:
        """All frequencies as an integer array of shape (size, d)"""
        return _frequency_table(self.d, self.R)

    def squared_norms(self) -> np.ndarray:
        """|xi|^2 for every enumerated frequency"""
        xi = self.frequencies()
        return np.sum(xi.astype(float) ** 2, axis=1)

    def sup_norms(self) -> np.ndarray:
        """|xi|_inf for every enumerated frequency"""
        return np.max(np.abs(self.frequencies()), axis=1)

    def enumerate(self, xi: Union[Tuple[int, ...], np.ndarray]) -> int:
        """Position of frequency xi in the enumeration"""
        xi = tuple(int(v) for v in np.atleast_1d(xi))
        if len(xi) != self.d:
            raise InvalidArgumentError(f"expected {self.d} components, got {len(xi)}")
        if max(abs(v) for v in xi) > self.R:
            raise InvalidArgumentError(f"frequency {xi} outside cutoff {self.R}")
        position = 0
        for v in xi:
            position = position * self.side + (v + self.R)
        return position

    def index(self, i: int) -> Tuple[int, ...]:
        """Frequency at enumeration position i"""
        if not 0 <= i < self.size:
            raise InvalidArgumentError(f"index {i} outside 0..{self.size - 1}")
        return tuple(int(v) for v in self.frequencies()[i])

    def with_cutoff(self, r: int) -> "FrequencyGrid":
        return FrequencyGrid(d=self.d, R=r)
