"""Closed-form eigenvalues of 2x2 and 3x3 real matrices."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from cyclelab.errors import ContractViolation

# Imaginary parts below this (relative to the matrix scale) are treated as real.
_REAL_TOL = 1e-12


@dataclass(frozen=True)
class EigenTriple:
    """Eigenvalues sorted by descending real part, ties by descending imaginary part.

    For a 2x2 matrix only two values are present and ``third`` is ``None``.
    """

    values: tuple[complex, ...]

    def __post_init__(self):
        if len(self.values) not in (2, 3):
            raise ContractViolation("an EigenTriple holds two or three eigenvalues")

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def third(self) -> complex | None:
        return self.values[2] if len(self.values) == 3 else None

    def padded(self) -> tuple[complex | None, complex | None, complex | None]:
        return tuple(self.values) + (None,) * (3 - len(self.values))

    def pair(self) -> tuple[complex, complex] | None:
        """The complex-conjugate pair (positive imaginary part first), if any."""
        for z in self.values:
            if z.imag > 0:
                return z, z.conjugate()
        return None

    def others(self) -> tuple[complex, ...]:
        """Eigenvalues outside the conjugate pair."""
        if self.pair() is None:
            return tuple(self.values)
        return tuple(z for z in self.values if z.imag == 0)

    def as_pairs(self) -> list[list[float] | None]:
        return [None if z is None else [z.real, z.imag] for z in self.padded()]


def _sort_key(z: complex):
    return (-z.real, -z.imag)


def _quadratic(b: float, c: float) -> tuple[complex, complex]:
    """Roots of ``x^2 + b x + c``."""
    disc = b * b - 4.0 * c
    if disc >= 0:
        root = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(root, b))
        if q == 0.0:
            return complex(0.0), complex(0.0)
        return complex(q), complex(c / q)
    re = -0.5 * b
    im = 0.5 * math.sqrt(-disc)
    return complex(re, im), complex(re, -im)


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def cubic_roots(a: float, b: float, c: float) -> list[complex]:
    """Roots of the monic cubic ``x^3 + a x^2 + b x + c``.

    Depressed-cubic reduction, then the trigonometric form when all three
    roots are real and Cardano's formula otherwise.  Each root gets one
    Newton polish on the original polynomial.
    """
    shift = a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3

    if p < 0 and disc < 0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * m)))
        theta = math.acos(arg) / 3.0
        roots = [complex(m * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift) for k in range(3)]
    else:
        u = _cbrt(-q / 2.0 - math.copysign(math.sqrt(max(disc, 0.0)), q))
        v = -p / (3.0 * u) if u != 0.0 else 0.0
        real = u + v - shift
        re = -(u + v) / 2.0 - shift
        im = math.sqrt(3.0) / 2.0 * (u - v)
        roots = [complex(real), complex(re, im), complex(re, -im)]

    def poly(z):
        return ((z + a) * z + b) * z + c

    def dpoly(z):
        return (3.0 * z + 2.0 * a) * z + b

    polished = []
    for z in roots:
        d = dpoly(z)
        if d != 0:
            z_new = z - poly(z) / d
            if abs(poly(z_new)) <= abs(poly(z)):
                z = z_new
        polished.append(z)
    return polished


def _symmetrize(roots: list[complex], scale: float) -> list[complex]:
    """Snap near-real roots to the real axis and make the complex pair exact conjugates."""
    tol = _REAL_TOL * scale
    complex_roots = [z for z in roots if abs(z.imag) > tol]
    real_roots = [complex(z.real) for z in roots if abs(z.imag) <= tol]
    if len(complex_roots) == 2:
        z1, z2 = complex_roots
        z = 0.5 * (z1 + z2.conjugate())
        z = complex(z.real, abs(z.imag))
        return real_roots + [z, z.conjugate()]
    # rounding broke the pairing; fall back to real parts
    return real_roots + [complex(z.real) for z in complex_roots]


def eigenvalues(matrix) -> EigenTriple:
    """Eigenvalues of a real 2x2 or 3x3 matrix from its characteristic polynomial."""
    J = np.asarray(matrix, dtype=float)
    if J.shape not in ((2, 2), (3, 3)):
        raise ContractViolation(f"expected a 2x2 or 3x3 matrix, got shape {J.shape}")
    if not np.all(np.isfinite(J)):
        raise ContractViolation("matrix has non-finite entries")
    scale = 1.0 + float(np.abs(J).max())
    if J.shape == (2, 2):
        tr = J[0, 0] + J[1, 1]
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        roots = list(_quadratic(-tr, det))
    else:
        tr = float(np.trace(J))
        minors = (
            J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
            + J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0]
            + J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1]
        )
        det = (
            J[0, 0] * (J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1])
            - J[0, 1] * (J[1, 0] * J[2, 2] - J[1, 2] * J[2, 0])
            + J[0, 2] * (J[1, 0] * J[2, 1] - J[1, 1] * J[2, 0])
        )
        roots = cubic_roots(-tr, minors, -det)
    roots = _symmetrize(roots, scale)
    return EigenTriple(tuple(sorted(roots, key=_sort_key)))


def characteristic_residual(matrix, z: complex) -> float:
    """``|det(J - z I)|`` computed directly, independent of the polynomial coefficients."""
    J = np.asarray(matrix, dtype=complex)
    return abs(np.linalg.det(J - z * np.eye(J.shape[0])))
