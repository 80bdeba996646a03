"""Published reference values used by ``verify`` and the acceptance tests.

Each row records (table, p1, p2, site, class, rho, ball volume, density).
Rows with ``p1=None`` are p1 -> infinity limits; ``limit`` says whether the
limit runs over even or odd p1.  Printed values are truncated decimals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .frobenius import TranslationClass

ERRATUM_2_21_4 = (
    "published (rho, Vol, delta) for (2,21,4) do not satisfy Vol/delta = area*2*rho*p1; "
    "the printed rho, volume and density are those of (2,20,4) at B with class (0,0,0)"
)
NOTE_T8_ODD = "printed class label (1/2,1/2,0) is inadmissible for odd p1; the values are those of (0,0,0) at C"


@dataclass(frozen=True)
class ReferenceRow:
    table: int
    p1: Optional[int]
    p2: int
    site: str
    class_text: str
    rho: float
    vol_ball: float
    density: float
    limit: Optional[str] = None
    erratum: str = ""
    note: str = ""

    @property
    def translation_class(self) -> TranslationClass:
        return TranslationClass.parse(self.class_text)

    @property
    def is_limit(self) -> bool:
        return self.p1 is None

    @property
    def stabilizer_order(self) -> int:
        if self.p1 is None:
            raise ValueError("limit rows have no finite stabilizer order at B")
        return {"Interior": 1, "A": 2, "B": self.p1, "C": self.p2}[self.site]

    @property
    def label(self) -> str:
        p1 = f"{self.p1}" if self.p1 is not None else f"inf({self.limit})"
        return f"T{self.table} (2,{p1},{self.p2}) {self.site} ({self.class_text})"


ROWS: tuple[ReferenceRow, ...] = (
    ReferenceRow(1, 6, 4, 'Interior', '0,0,0', 0.35877, 0.1951, 0.5193, limit=None),
    ReferenceRow(1, 6, 4, 'Interior', '0,1/2,1/2', 0.40707, 0.28568, 0.67018, limit=None),
    ReferenceRow(1, 6, 4, 'Interior', '1/2,1/2,0', 0.39304, 0.25697, 0.62433, limit=None),
    ReferenceRow(1, 6, 4, 'Interior', '1/2,0,1/2', 0.38558, 0.24251, 0.6006, limit=None),
    ReferenceRow(2, 7, 3, 'Interior', '0,0,0', 0.18773, 0.02777, 0.49454, limit=None),
    ReferenceRow(2, 8, 3, 'Interior', '1/2,1/2,0', 0.2704, 0.08322, 0.5878, limit=None),
    ReferenceRow(2, 9, 3, 'Interior', '0,1/3,1/3', 0.29013, 0.10288, 0.50792, limit=None),
    ReferenceRow(2, 10, 3, 'Interior', '1/2,1/2,0', 0.33097, 0.15298, 0.55173, limit=None),
    ReferenceRow(2, 11, 3, 'Interior', '0,0,0', 0.31211, 0.12819, 0.43142, limit=None),
    ReferenceRow(2, 12, 3, 'Interior', '1/2,1/2,0', 0.36067, 0.19824, 0.52487, limit=None),
    ReferenceRow(2, 20, 3, 'Interior', '1/2,1/2,0', 0.40122, 0.27347, 0.46491, limit=None),
    ReferenceRow(2, None, 3, 'Interior', '1/2,1/2,0', 0.42298, 0.32081, 0.36213, limit='even'),
    ReferenceRow(3, 5, 4, 'Interior', '1/2,0,1/2', 0.30618, 0.12099, 0.62892, limit=None),
    ReferenceRow(3, 6, 4, 'Interior', '0,1/2,1/2', 0.40707, 0.28568, 0.67018, limit=None),
    ReferenceRow(3, 7, 4, 'Interior', '1/2,0,1/2', 0.42812, 0.33273, 0.57723, limit=None),
    ReferenceRow(3, 8, 4, 'Interior', '0,1/2,1/2', 0.48221, 0.47702, 0.62976, limit=None),
    ReferenceRow(3, 9, 4, 'Interior', '1/2,0,1/2', 0.47174, 0.44632, 0.54208, limit=None),
    ReferenceRow(3, 10, 4, 'Interior', '0,1/2,1/2', 0.51509, 0.58265, 0.6001, limit=None),
    ReferenceRow(3, 11, 4, 'Interior', '1/2,0,1/2', 0.49294, 0.50992, 0.51743, limit=None),
    ReferenceRow(3, 12, 4, 'Interior', '0,1/2,1/2', 0.53259, 0.64488, 0.57813, limit=None),
    ReferenceRow(3, 20, 4, 'Interior', '0,1/2,1/2', 0.5577, 0.74181, 0.52923, limit=None),
    ReferenceRow(3, None, 4, 'Interior', '0,1/2,1/2', 0.57167, 0.79981, 0.44533, limit='even'),
    ReferenceRow(4, 5, 5, 'Interior', '0,2/5,2/5', 0.42561, 0.32688, 0.61116, limit=None),
    ReferenceRow(4, 6, 5, 'Interior', '1/2,1/2,0', 0.48745, 0.49292, 0.60351, limit=None),
    ReferenceRow(4, 7, 5, 'Interior', '0,0,0', 0.47862, 0.46632, 0.49339, limit=None),
    ReferenceRow(4, 8, 5, 'Interior', '1/2,1/2,0', 0.5445, 0.68969, 0.57598, limit=None),
    ReferenceRow(4, 9, 5, 'Interior', '0,0,0', 0.51171, 0.57114, 0.47022, limit=None),
    ReferenceRow(4, 10, 5, 'Interior', '1/2,1/2,0', 0.57054, 0.79499, 0.55441, limit=None),
    ReferenceRow(4, 11, 5, 'Interior', '0,0,0', 0.52826, 0.62909, 0.45323, limit=None),
    ReferenceRow(4, 12, 5, 'Interior', '1/2,1/2,0', 0.58464, 0.85633, 0.53796, limit=None),
    ReferenceRow(4, 20, 5, 'Interior', '1/2,1/2,0', 0.60513, 0.95108, 0.50028, limit=None),
    ReferenceRow(4, None, 5, 'Interior', '1/2,1/2,0', 0.61665, 1.0074, 0.43334, limit='even'),
    ReferenceRow(5, 7, 3, 'B', '0,0,0', 0.54527, 0.69267, 0.60653, limit=None),
    ReferenceRow(5, 8, 3, 'B', '0,0,0', 0.76428, 1.94411, 0.607262, limit=None),
    ReferenceRow(5, 9, 3, 'B', '0,0,0', 0.92753, 3.53909, 0.607267, limit=None),
    ReferenceRow(5, 10, 3, 'B', '0,0,0', 1.06127, 5.39521, 0.606823, limit=None),
    ReferenceRow(5, 11, 3, 'B', '0,0,0', 1.17585, 7.46309, 0.60608, limit=None),
    ReferenceRow(5, 12, 3, 'B', '0,0,0', 1.27668, 9.70891, 0.60516, limit=None),
    ReferenceRow(5, 20, 3, 'B', '0,0,0', 1.82969, 31.96254, 0.59576, limit=None),
    ReferenceRow(5, None, 3, 'C', '1/2,1/2,0', 0.63428, 1.0979, 0.27548, limit='even'),
    ReferenceRow(6, 5, 4, 'B', '1/2,0,1/2', 0.72384, 1.64498, 0.72337, limit=None),
    ReferenceRow(6, 6, 4, 'B', '1/2,0,1/2', 1.01772, 4.72953, 0.73962, limit=None),
    ReferenceRow(6, 7, 4, 'B', '1/2,0,1/2', 1.23599, 8.75091, 0.75121, limit=None),
    ReferenceRow(6, 8, 4, 'B', '1/2,0,1/2', 1.41361, 13.5019, 0.76007, limit=None),
    ReferenceRow(6, 9, 4, 'B', '1/2,0,1/2', 1.56467, 18.85517, 0.76716, limit=None),
    ReferenceRow(6, 10, 4, 'B', '1/2,0,1/2', 1.69666, 24.72283, 0.77303, limit=None),
    ReferenceRow(6, 11, 4, 'B', '1/2,0,1/2', 1.81413, 31.04013, 0.77804, limit=None),
    ReferenceRow(6, 12, 4, 'B', '1/2,0,1/2', 1.92013, 37.75731, 0.7824, limit=None),
    ReferenceRow(6, 18, 4, 'B', '1/2,0,1/2', 2.40393, 84.67149, 0.80082, limit=None),
    ReferenceRow(6, 19, 4, 'B', '1/2,0,1/2', 2.46761, 93.3904, 0.80312, limit=None),
    ReferenceRow(6, 20, 4, 'B', '1/2,0,1/2', 2.52789, 102.32545, 0.80529, limit=None),
    ReferenceRow(6, 21, 4, 'B', '0,0,0', 2.18922, 60.06928, 0.54587, limit=None, erratum=ERRATUM_2_21_4),
    ReferenceRow(6, 22, 4, 'B', '0,0,0', 2.286, 70.30425, 0.54385, limit=None),
    ReferenceRow(6, 23, 4, 'B', '0,0,0', 2.33104, 75.5328, 0.54285, limit=None),
    ReferenceRow(6, 24, 4, 'B', '0,0,0', 2.37412, 80.82932, 0.54185, limit=None),
    ReferenceRow(6, None, 4, 'A', '0,1/2,1/2', 0.76034, 1.91344, 0.40051, limit='even'),
    ReferenceRow(6, None, 4, 'A', '0,0,0', 0.65847, 1.23095, 0.29752, limit='odd'),
    ReferenceRow(7, 5, 5, 'A', '0,2/5,2/5', 0.57897, 0.83129, 0.57128, limit=None),
    ReferenceRow(7, 6, 5, 'C', '1/2,1/2,0', 1.08335, 5.75699, 0.63431, limit=None),
    ReferenceRow(7, 7, 5, 'B', '0,0,0', 1.23499, 8.72815, 0.51127, limit=None),
    ReferenceRow(7, 8, 5, 'C', '1/2,1/2,0', 1.18247, 7.59768, 0.58434, limit=None),
    ReferenceRow(7, 9, 5, 'B', '0,0,0', 1.50608, 16.61921, 0.51653, limit=None),
    ReferenceRow(7, 10, 5, 'C', '1/2,1/2,0', 1.22545, 8.51436, 0.55289, limit=None),
    ReferenceRow(7, 11, 5, 'B', '0,0,0', 1.71621, 25.69831, 0.51807, limit=None),
    ReferenceRow(7, 12, 5, 'C', '1/2,1/2,0', 1.24813, 9.02911, 0.53138, limit=None),
    ReferenceRow(7, 20, 5, 'B', '0,0,0', 2.32684, 75.03233, 0.51321, limit=None),
    ReferenceRow(7, None, 5, 'C', '1/2,1/2,0', 1.29808, 10.24237, 0.41859, limit='even'),
    ReferenceRow(8, 6, 6, 'B', '1/2,0,1/2', 1.32353, 10.90425, 0.65561, limit=None),
    ReferenceRow(8, 7, 6, 'B', '1/2,0,1/2', 1.51801, 17.05731, 0.67063, limit=None),
    ReferenceRow(8, 8, 6, 'B', '1/2,0,1/2', 1.68241, 24.03027, 0.68197, limit=None),
    ReferenceRow(8, 9, 6, 'B', '1/2,0,1/2', 1.82523, 31.69581, 0.69094, limit=None),
    ReferenceRow(8, 10, 6, 'B', '1/2,0,1/2', 1.95167, 39.96131, 0.6983, limit=None),
    ReferenceRow(8, 11, 6, 'B', '1/2,0,1/2', 2.06521, 48.75648, 0.70451, limit=None),
    ReferenceRow(8, 12, 6, 'B', '1/2,0,1/2', 2.16831, 58.0262, 0.70985, limit=None),
    ReferenceRow(8, 60, 6, 'B', '1/2,0,1/2', 4.03967, 759.64262, 0.78758, limit=None),
    ReferenceRow(8, 61, 6, 'B', '1/2,0,1/2', 4.05878, 777.39291, 0.78836, limit=None),
    ReferenceRow(8, 62, 6, 'B', '1/2,0,1/2', 4.07757, 795.2314, 0.78913, limit=None),
    ReferenceRow(8, 63, 6, 'B', '0,0,0', 3.54729, 413.0446, 0.46329, limit=None),
    ReferenceRow(8, 64, 6, 'C', '1/2,1/2,0', 1.51908, 17.09714, 0.46984, limit=None),
    ReferenceRow(8, 65, 6, 'B', '0,0,0', 3.57857, 429.73373, 0.46239, limit=None),
    ReferenceRow(8, 66, 6, 'C', '1/2,1/2,0', 1.51918, 17.1007, 0.46921, limit=None),
    ReferenceRow(8, None, 6, 'C', '1/2,1/2,0', 1.52069, 17.15693, 0.4489, limit='even'),
    ReferenceRow(8, None, 6, 'C', '0,0,0', 1.31695, 10.73024, 0.32418, limit='odd', note=NOTE_T8_ODD),)

# Full kernel state of the (2,6,4) optimum for class (0,1/2,1/2):
# geodesic directions (u_i, v_i), kernel polar coordinates and lattice parameter.
EXAMPLE_264_STATE = {
    "u0": -2.46941,
    "v0": 0.0,
    "u1": 0.31798,
    "v1": 0.523598,
    "u2": 1.475468,
    "v2": 0.523598,
    "r": 0.489201,
    "alpha": -0.938184,
    "xi": 0.814141,
}
EXAMPLE_264_CLASS = "0,1/2,1/2"
EXAMPLE_264_KLEIN = (0.268182, -0.365808)
EXAMPLE_264_VOL_BALL = 0.28568
EXAMPLE_264_VOL_DV = 0.42628
EXAMPLE_264_DENSITY = 0.67018

# Translation classes of (2,6,4), both signs listed.
EXAMPLE_264_CLASSES = frozenset(
    TranslationClass.of(*c)
    for c in [
        (0, 0, 0),
        (0, Fraction(1, 2), Fraction(1, 2)),
        (Fraction(1, 2), 0, Fraction(1, 2)),
        (Fraction(1, 2), Fraction(1, 2), 0),
    ]
)

LIMIT_P1 = {"even": (100, 200, 400), "odd": (101, 201, 401)}


def finite_rows() -> list[ReferenceRow]:
    return [r for r in ROWS if not r.is_limit]


def limit_rows() -> list[ReferenceRow]:
    return [r for r in ROWS if r.is_limit]


def table_rows(table: int) -> list[ReferenceRow]:
    return [r for r in ROWS if r.table == table]
