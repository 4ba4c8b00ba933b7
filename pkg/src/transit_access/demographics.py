"""Demographic count vectors and their aggregation onto the hex grid.

Counts are carried at fractional-person precision so that proportional
splitting conserves mass exactly; rounding happens only at presentation
time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .errors import DataError
from .hexgrid import HexCellId

DIMENSIONS = ("race", "age_sex", "income", "vehicle")

RACE_BRACKETS = ("white", "black", "asian", "other")
VEHICLE_BRACKETS = ("no_vehicle", "has_vehicle")

DEFAULT_AGE_SEX_BRACKETS = ("male_under_40", "male_40_plus", "female_under_40", "female_40_plus")
DEFAULT_INCOME_BRACKETS = ("under_25k", "25k_75k", "75k_150k", "150k_plus")

#: Per-dimension bracket sums may drift from the total by at most this much
#: (fractional persons appear after areal splitting).
BRACKET_SUM_TOL = 0.5


@dataclass(frozen=True)
class DemographicSchema:
    """Bracket names per dimension. Race and vehicle brackets are fixed."""

    age_sex: tuple[str, ...] = DEFAULT_AGE_SEX_BRACKETS
    income: tuple[str, ...] = DEFAULT_INCOME_BRACKETS

    def __post_init__(self):
        for dim in ("age_sex", "income"):
            brackets = getattr(self, dim)
            if not brackets:
                raise DataError(f"dimension {dim} needs at least one bracket")
            if len(set(brackets)) != len(brackets):
                raise DataError(f"duplicate bracket names in {dim}: {brackets}")

    def brackets(self, dimension: str) -> tuple[str, ...]:
        if dimension == "race":
            return RACE_BRACKETS
        if dimension == "vehicle":
            return VEHICLE_BRACKETS
        if dimension == "age_sex":
            return self.age_sex
        if dimension == "income":
            return self.income
        raise DataError(f"unknown demographic dimension {dimension!r}")

    def columns(self) -> list[str]:
        """CSV column names, ``<dimension>.<bracket>``, in deterministic order."""
        cols = []
        for dim in DIMENSIONS:
            cols.extend(f"{dim}.{b}" for b in self.brackets(dim))
        return cols


@dataclass(frozen=True)
class DemographicVector:
    """Population counts by total and per-dimension brackets.

    Closed under addition and scalar multiplication, which is what areal
    interpolation needs.
    """

    total: float
    race: Mapping[str, float]
    age_sex: Mapping[str, float]
    income: Mapping[str, float]
    vehicle: Mapping[str, float]

    def counts(self, dimension: str) -> Mapping[str, float]:
        try:
            return getattr(self, dimension)
        except AttributeError:
            raise DataError(f"unknown demographic dimension {dimension!r}") from None

    def __add__(self, other: "DemographicVector") -> "DemographicVector":
        return DemographicVector(
            total=self.total + other.total,
            race=_merge(self.race, other.race),
            age_sex=_merge(self.age_sex, other.age_sex),
            income=_merge(self.income, other.income),
            vehicle=_merge(self.vehicle, other.vehicle),
        )

    def __mul__(self, k: float) -> "DemographicVector":
        return DemographicVector(
            total=self.total * k,
            race={b: v * k for b, v in self.race.items()},
            age_sex={b: v * k for b, v in self.age_sex.items()},
            income={b: v * k for b, v in self.income.items()},
            vehicle={b: v * k for b, v in self.vehicle.items()},
        )

    __rmul__ = __mul__

    @classmethod
    def zero(cls, schema: DemographicSchema) -> "DemographicVector":
        return cls(
            total=0.0,
            race={b: 0.0 for b in RACE_BRACKETS},
            age_sex={b: 0.0 for b in schema.age_sex},
            income={b: 0.0 for b in schema.income},
            vehicle={b: 0.0 for b in VEHICLE_BRACKETS},
        )

    def validate(self, schema: DemographicSchema, context: str = "") -> None:
        where = f" ({context})" if context else ""
        if self.total < 0:
            raise DataError(f"negative total population{where}: {self.total}")
        for dim in DIMENSIONS:
            counts = self.counts(dim)
            expected = schema.brackets(dim)
            if tuple(counts.keys()) != expected:
                raise DataError(
                    f"dimension {dim}{where}: brackets {tuple(counts)} != schema {expected}"
                )
            for bracket, value in counts.items():
                if value < 0:
                    raise DataError(f"negative count {dim}.{bracket}{where}: {value}")
            drift = abs(sum(counts.values()) - self.total)
            if drift > BRACKET_SUM_TOL:
                raise DataError(
                    f"dimension {dim}{where} sums to {sum(counts.values()):.3f}, "
                    f"total is {self.total:.3f}"
                )


def _merge(a: Mapping[str, float], b: Mapping[str, float]) -> dict[str, float]:
    if tuple(a.keys()) != tuple(b.keys()):
        raise DataError(f"bracket mismatch: {tuple(a)} vs {tuple(b)}")
    return {k: a[k] + b[k] for k in a}


class HexDemographics:
    """Per-cell demographic vectors, stored columnar for fast aggregation.

    Cells are kept in sorted id order; all per-bracket data lives in numpy
    arrays aligned with that order.
    """

    def __init__(
        self,
        schema: DemographicSchema,
        cells: list[HexCellId],
        totals: np.ndarray,
        counts: dict[tuple[str, str], np.ndarray],
    ):
        order = sorted(range(len(cells)), key=lambda i: cells[i])
        self.schema = schema
        self.cells: tuple[HexCellId, ...] = tuple(cells[i] for i in order)
        self._index = {c: i for i, c in enumerate(self.cells)}
        self._totals = np.asarray(totals, dtype=float)[order]
        self._counts = {key: np.asarray(arr, dtype=float)[order] for key, arr in counts.items()}
        for dim in DIMENSIONS:
            for bracket in schema.brackets(dim):
                if (dim, bracket) not in self._counts:
                    raise DataError(f"missing bracket array {dim}.{bracket}")

    @classmethod
    def from_vectors(
        cls, schema: DemographicSchema, vectors: Mapping[HexCellId, DemographicVector]
    ) -> "HexDemographics":
        cells = list(vectors.keys())
        totals = np.array([vectors[c].total for c in cells], dtype=float)
        counts = {}
        for dim in DIMENSIONS:
            for bracket in schema.brackets(dim):
                counts[(dim, bracket)] = np.array(
                    [vectors[c].counts(dim)[bracket] for c in cells], dtype=float
                )
        return cls(schema, cells, totals, counts)

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, cell: HexCellId) -> bool:
        return cell in self._index

    def total(self, cell: HexCellId) -> float:
        i = self._index.get(cell)
        return float(self._totals[i]) if i is not None else 0.0

    def totals_array(self) -> np.ndarray:
        return self._totals

    def bracket_array(self, dimension: str, bracket: str) -> np.ndarray:
        try:
            return self._counts[(dimension, bracket)]
        except KeyError:
            raise DataError(f"unknown bracket {dimension}.{bracket}") from None

    def vector(self, cell: HexCellId) -> DemographicVector | None:
        i = self._index.get(cell)
        if i is None:
            return None
        return DemographicVector(
            total=float(self._totals[i]),
            race={b: float(self._counts[("race", b)][i]) for b in RACE_BRACKETS},
            age_sex={b: float(self._counts[("age_sex", b)][i]) for b in self.schema.age_sex},
            income={b: float(self._counts[("income", b)][i]) for b in self.schema.income},
            vehicle={b: float(self._counts[("vehicle", b)][i]) for b in VEHICLE_BRACKETS},
        )

    def items(self) -> Iterator[tuple[HexCellId, DemographicVector]]:
        for cell in self.cells:
            yield cell, self.vector(cell)  # type: ignore[misc]

    def population_total(self) -> float:
        return float(self._totals.sum())

    def bracket_total(self, dimension: str, bracket: str) -> float:
        return float(self.bracket_array(dimension, bracket).sum())

    # -- cache format --------------------------------------------------------

    def to_csv(self) -> str:
        cols = self.schema.columns()
        lines = ["cell_id,total," + ",".join(cols)]
        for i, cell in enumerate(self.cells):
            row = [cell.key(), repr(float(self._totals[i]))]
            for col in cols:
                dim, bracket = col.split(".", 1)
                row.append(repr(float(self._counts[(dim, bracket)][i])))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, schema: DemographicSchema) -> "HexDemographics":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = lines[0].split(",")
        expected = ["cell_id", "total"] + schema.columns()
        if header != expected:
            raise DataError(f"demographics cache header mismatch: {header}")
        cells, totals = [], []
        counts: dict[tuple[str, str], list[float]] = {
            (dim, b): [] for dim in DIMENSIONS for b in schema.brackets(dim)
        }
        for line in lines[1:]:
            parts = line.split(",")
            cells.append(HexCellId.parse(parts[0]))
            totals.append(float(parts[1]))
            for col, value in zip(header[2:], parts[2:]):
                dim, bracket = col.split(".", 1)
                counts[(dim, bracket)].append(float(value))
        return cls(
            schema,
            cells,
            np.array(totals, dtype=float),
            {key: np.array(vals, dtype=float) for key, vals in counts.items()},
        )
