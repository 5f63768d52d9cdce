"""Butcher tableaux of explicit Runge-Kutta schemes"""

import logging
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import InvalidArgumentError

logger = logging.getLogger(__name__)

# Rows of a tableau must reproduce c and sum b to one within this tolerance.
CONSISTENCY_TOLERANCE = 1e-14


class ButcherTableau(BaseModel):
    """Coefficients (a, b, c) of an explicit s-stage scheme

    ``a`` is stored as a full s x s matrix that must be strictly lower
    triangular.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    a: Tuple[Tuple[float, ...], ...]
    b: Tuple[float, ...]
    c: Tuple[float, ...]
    order: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_consistency(self) -> "ButcherTableau":
        s = len(self.b)
        if len(self.c) != s or len(self.a) != s or any(len(row) != s for row in self.a):
            raise ValueError(f"tableau {self.name}: a, b, c disagree on the stage count")
        a = np.array(self.a)
        if np.any(np.triu(a) != 0.0):
            raise ValueError(f"tableau {self.name}: a is not strictly lower triangular")
        if np.max(np.abs(a.sum(axis=1) - np.array(self.c))) > CONSISTENCY_TOLERANCE:
            raise ValueError(f"tableau {self.name}: c_i != sum_j a_ij")
        if abs(sum(self.b) - 1.0) > CONSISTENCY_TOLERANCE:
            raise ValueError(f"tableau {self.name}: weights do not sum to 1")
        return self

    @classmethod
    def from_rows(
        cls,
        name: str,
        rows: List[List[float]],
        b: List[float],
        order: int,
    ) -> "ButcherTableau":
        """Build from the below-diagonal rows, c taken as the row sums"""
        s = len(b)
        a = np.zeros((s, s))
        for i, row in enumerate(rows, start=1):
            a[i, : len(row)] = row
        return cls(
            name=name,
            a=tuple(tuple(float(v) for v in r) for r in a),
            b=tuple(float(v) for v in b),
            c=tuple(float(v) for v in a.sum(axis=1)),
            order=order,
        )

    @property
    def stages(self) -> int:
        return len(self.b)

    def stability_polynomial(self, z: complex) -> complex:
        """R(z) = 1 + z b^T (I - z A)^{-1} 1, the one-step factor on y' = lambda y"""
        s = self.stages
        a = np.array(self.a)
        ones = np.ones(s)
        stage_values = np.linalg.solve(np.eye(s) - z * a, ones)
        return complex(1.0 + z * np.dot(np.array(self.b), stage_values))


# First six stages of the Dormand-Prince pair with the fifth-order weights.
DOPRI5_6STAGE = ButcherTableau.from_rows(
    "dopri5_6stage",
    rows=[
        [1 / 5],
        [3 / 40, 9 / 40],
        [44 / 45, -56 / 15, 32 / 9],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    ],
    b=[35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
    order=5,
)

RK4 = ButcherTableau.from_rows(
    "rk4",
    rows=[[1 / 2], [0.0, 1 / 2], [0.0, 0.0, 1.0]],
    b=[1 / 6, 1 / 3, 1 / 3, 1 / 6],
    order=4,
)


class TableauRegistry:
    """Registry of named tableaux"""

    def __init__(self):
        self.tableaux: Dict[str, ButcherTableau] = {}
        self.aliases: Dict[str, str] = {}

    def register(self, tableau: ButcherTableau, *aliases: str) -> None:
        """Register a tableau under its name and any aliases"""
        self.tableaux[tableau.name] = tableau
        for alias in aliases:
            self.aliases[alias] = tableau.name

    def get(self, name: str) -> ButcherTableau:
        """Look up a tableau by name or alias"""
        key = self.aliases.get(name, name)
        if key not in self.tableaux:
            logger.error(f"Unknown tableau: {name}")
            raise InvalidArgumentError(
                f"unknown tableau {name!r}; available: {', '.join(self.names())}"
            )
        return self.tableaux[key]

    def names(self) -> List[str]:
        """Registered names and aliases"""
        return sorted(set(self.tableaux) | set(self.aliases))


# Global tableau registry
tableau_registry = TableauRegistry()
tableau_registry.register(DOPRI5_6STAGE, "dopri5")
tableau_registry.register(RK4)


def get_tableau(name: str) -> ButcherTableau:
    return tableau_registry.get(name)
