"""The almost-universal family Q_p, p = 5 mod 8, and the ternary form behind it."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import ArgumentError, VerificationError
from .exactmath import is_prime
from .qform import QuadForm, from_gram
from .theta import representation_counts

TERNARY_GRAM = ((2, 1, 1), (1, 2, 1), (1, 1, 2))
OBSTRUCTED_MOD32 = (14, 30)


@dataclass(frozen=True)
class FamilyForm:
    p: int
    form: QuadForm

    @property
    def w_coefficient(self) -> int:
        return (self.p + 3) // 8


def family_form(p: int) -> FamilyForm:
    if not is_prime(p) or p % 8 != 5:
        raise ArgumentError(f"the family needs a prime p = 5 mod 8, got {p}")
    top = (p + 3) // 4
    gram = [[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 2, 1], [1, 1, 1, top]]
    return FamilyForm(p, from_gram(gram))


def diagonal_identity_holds(F: FamilyForm) -> bool:
    """Q_p = (x + (y+z+w)/2)^2 + 3/4 (y + (z+w)/3)^2 + 2/3 (z + w/4)^2 + (p/8) w^2, exactly."""
    a = (Fraction(1), Fraction(3, 4), Fraction(2, 3), Fraction(F.p, 8))
    h = Fraction(1, 2)
    m = (
        (1, h, h, h),
        (0, 1, Fraction(1, 3), Fraction(1, 3)),
        (0, 0, 1, Fraction(1, 4)),
        (0, 0, 0, 1),
    )
    expanded = [[sum(a[k] * m[k][i] * m[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
    return expanded == [list(row) for row in F.form.half_gram]


def _square_class_set(N: int, limit: Fraction | None) -> list[int]:
    out = set()
    base = 14
    while base <= N:
        for n in range(base, N + 1, 16 * base // 14):
            if limit is None or n < limit:
                out.add(n)
        base *= 4
    return sorted(out)


def predicted_exceptions(p: int, N: int) -> list[int]:
    """n <= N with n < p/8 and n = 4^k (16 l + 14)."""
    family_form(p)
    return _square_class_set(N, Fraction(p, 8))


@dataclass(frozen=True)
class ExceptionSet:
    p: int
    N: int
    computed: tuple[int, ...]
    predicted: tuple[int, ...]

    @property
    def agrees(self) -> bool:
        return self.computed == self.predicted

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "p_over_8": self.p / 8,
            "N": self.N,
            "computed": list(self.computed),
            "predicted": list(self.predicted),
            "verdict": self.agrees,
        }


def verify_family(p: int, N: int) -> tuple[ExceptionSet, bool]:
    F = family_form(p)
    r = representation_counts(F.form, N)
    computed = tuple(int(n) for n in np.flatnonzero(r[1:] == 0) + 1)
    result = ExceptionSet(p, N, computed, tuple(predicted_exceptions(p, N)))
    return result, result.agrees


# -- the ternary x^2 + xy + xz + y^2 + yz + z^2 ----------------------------------------

def ternary_form() -> QuadForm:
    return from_gram(TERNARY_GRAM)


def ternary_exceptions(N: int) -> list[int]:
    """Zero set of r(n), 1 <= n <= N, after checking the mod-32 classes 14, 30 are obstructed."""
    if N < 1:
        raise ArgumentError("N must be positive")
    T = ternary_form()
    total, _, _ = _kernels.residue_histograms(np.array(TERNARY_GRAM), 2, 32, 3)
    for c in OBSTRUCTED_MOD32:
        if total[c] != 0:
            raise VerificationError(f"class {c} mod 32 is represented locally")
    r = representation_counts(T, N)
    return [int(n) for n in np.flatnonzero(r[1:] == 0) + 1]


def ternary_mod32_classes() -> list[int]:
    """Residues mod 32 not attained by the ternary."""
    total, _, _ = _kernels.residue_histograms(np.array(TERNARY_GRAM), 2, 32, 3)
    return [int(c) for c in np.flatnonzero(total == 0)]


def ternary_value(x: int, y: int, z: int) -> int:
    return x * x + x * y + x * z + y * y + y * z + z * z + x + y + z


def ternary_construction(Nval: int) -> tuple[int, int, int]:
    """(x, y, z) with Nval = (4z+1)^2 + 2(3y+z+1)^2 + 6(2x+y+z+1)^2.

    Representations of Nval by X^2 + 2Y^2 + 6Z^2 are searched by increasing
    |Z|, then |X|, over all sign choices, until X = 1 mod 4, Y = z + 1 mod 3 and
    Z = y + z + 1 mod 2 hold for the recovered z and y.
    """
    Nval = int(Nval)
    if Nval <= 0 or Nval % 24 != 9:
        raise ArgumentError(f"need Nval = 9 mod 24, got {Nval}")
    for Z_abs in range(math.isqrt(Nval // 6) + 1):
        rest = Nval - 6 * Z_abs * Z_abs
        for X_abs in range(math.isqrt(rest) + 1):
            rest2 = rest - X_abs * X_abs
            if rest2 % 2:
                continue
            Y_abs = math.isqrt(rest2 // 2)
            if 2 * Y_abs * Y_abs != rest2:
                continue
            for X, Y, Z in itertools.product({X_abs, -X_abs}, {Y_abs, -Y_abs}, {Z_abs, -Z_abs}):
                if (X - 1) % 4:
                    continue
                z = (X - 1) // 4
                if (Y - z - 1) % 3:
                    continue
                y = (Y - z - 1) // 3
                if (Z - y - z - 1) % 2:
                    continue
                x = (Z - y - z - 1) // 2
                return x, y, z
    raise VerificationError(f"no admissible representation of {Nval}")


def construction_identity(p: int, triple: tuple[int, int, int]) -> bool:
    """Q_p((x, y, z, 1)) = m + (p+3)/8 where 24 m + 9 = Nval for the triple's Nval."""
    F = family_form(p)
    x, y, z = triple
    m = ternary_value(x, y, z)
    nval = (4 * z + 1) ** 2 + 2 * (3 * y + z + 1) ** 2 + 6 * (2 * x + y + z + 1) ** 2
    return nval == 24 * m + 9 and F.form((x, y, z, 1)) == m + F.w_coefficient
