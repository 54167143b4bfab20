"""Continuations of divergent pairings by Taylor subtraction and counterterms.

When the naive product limit fails, the pairing still exists on test
functions whose derivatives through order p vanish at the origin.  The
continuation evaluated here is

    (product, phi) = (Tbar, phibar) + sum_{k <= p} c_k (delta^(k), phi),

where phibar(x) = phi(x) - omega(x) * sum_{k <= p} phi^(k)(0) x^k / k! is the
subtracted test function (omega a plateau cutoff, identically 1 near 0) and
the c_k are free constants: the entire ambiguity of the continuation is the
span of delta derivatives through order p, which ``nonuniqueness_scan``
verifies numerically.  Sign convention: (delta^(k), phi) = (-1)^k phi^(k)(0).

The subtraction is arranged so that phibar's derivatives at 0 through order p
are *bitwise* zero: on the plateau omega contributes exactly 1 with exactly
vanishing derivatives, and the Taylor term's m-th derivative is evaluated in
shifted Horner form so its value at 0 is the stored coefficient itself.

For products supported at the origin (every delta-derived catalog product)
the c = 0 value is genuinely independent of the cutoff geometry: changing
omega only alters the subtraction where the product's boundary value already
vanishes.  For divergent products with support off the origin a cutoff change
shifts the value by a counterterm, i.e. reparametrizes the same family; the
scan and independence checks below make that distinction measurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as npoly

from .pairing import (
    DEFAULT_SCHEDULE,
    DEFAULT_TOLERANCES,
    PairingResult,
    ProductExpression,
    Schedule,
    Tolerances,
    limit_pairing,
)
from .testfn import (
    OrderExceededError,
    PlateauCutoff,
    TestFunction,
    build_plateau_cutoff,
    vanish_probe,
)


class ExtensionError(RuntimeError):
    """The subtracted pairing failed to converge; carries the PairingResult."""

    def __init__(self, message, pairing: PairingResult | None = None):
        super().__init__(message)
        self.pairing = pairing


class SubtractedFunction:
    """phi minus its cutoff-localized Taylor polynomial through order p.

    Supports the same (x, q) evaluation protocol as TestFunction, with
    derivatives by Leibniz on the closed forms.  All derivatives through
    order p vanish exactly at the origin.
    """

    def __init__(self, phi: TestFunction, omega: PlateauCutoff, p: int):
        if p < 0:
            raise ValueError("subtraction order must be >= 0")
        if p > phi.max_order:
            raise OrderExceededError(
                f"subtraction order {p} exceeds test function max_order {phi.max_order}"
            )
        if omega.max_order < phi.max_order:
            raise OrderExceededError(
                "cutoff supports fewer derivatives than the test function"
            )
        self.phi = phi
        self.omega = omega
        self.p = p
        self.max_order = min(phi.max_order, omega.max_order)
        self.coeffs = tuple(phi(0.0, k) for k in range(p + 1))

    def taylor(self, x, m: int = 0):
        """m-th derivative of the Taylor polynomial, in shifted form.

        T^(m)(x) = sum_{k >= m} phi^(k)(0) x^(k-m) / (k-m)!  -- evaluated so
        that T^(m)(0) is literally the stored coefficient phi^(m)(0).
        """
        if m > self.p:
            return np.zeros_like(np.asarray(x, dtype=float))
        shifted = [self.coeffs[m + j] / math.factorial(j)
                   for j in range(self.p - m + 1)]
        return npoly.polyval(np.asarray(x, dtype=float), shifted)

    def __call__(self, x, q: int = 0):
        if not 0 <= q <= self.max_order:
            raise OrderExceededError(f"derivative order {q} outside [0, {self.max_order}]")
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        sub = np.zeros_like(x)
        for j in range(q + 1):
            sub = sub + math.comb(q, j) * self.omega(x, j) * self.taylor(x, q - j)
        val = self.phi(x, q) - sub
        return float(val[0]) if scalar else val

    def decay_radius(self) -> float:
        return max(self.phi.decay_radius(), self.omega.support + 1.0)


def taylor_subtract(phi: TestFunction, omega: PlateauCutoff, p: int) -> SubtractedFunction:
    return SubtractedFunction(phi, omega, p)


# ---------------------------------------------------------------------------
# extensions
# ---------------------------------------------------------------------------


def _default_cutoff() -> PlateauCutoff:
    return build_plateau_cutoff(1.0, 2.0)


@dataclass(frozen=True)
class Extension:
    """A continuation: expression, subtraction order, counterterms, cutoff.

    subtract=False marks the degenerate case of an already convergent
    expression: no Taylor term is removed (the pairing exists as is) and the
    stated p only sizes the counterterm vector.
    """

    expr: ProductExpression
    p: int
    c: tuple[complex, ...]
    omega: PlateauCutoff
    subtract: bool = True

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(complex(v) for v in self.c))
        if self.p < 0:
            raise ValueError("subtraction order must be >= 0")
        if len(self.c) != self.p + 1:
            raise ValueError(
                f"need {self.p + 1} counterterms for order {self.p}, got {len(self.c)}"
            )

    @classmethod
    def minimal(cls, expr: ProductExpression, p: int,
                omega: PlateauCutoff | None = None,
                subtract: bool = True) -> "Extension":
        """The c = 0 representative of the continuation family."""
        return cls(expr, p, (0j,) * (p + 1), omega or _default_cutoff(), subtract)

    def with_counterterms(self, c) -> "Extension":
        return replace(self, c=tuple(complex(v) for v in c))


@dataclass(frozen=True)
class ExtensionResult:
    value: complex
    tbar_phibar: complex
    counterterm_part: complex
    pairing: PairingResult


def counterterm_value(c, phi) -> complex:
    """sum_k c_k (delta^(k), phi) = sum_k c_k (-1)^k phi^(k)(0)."""
    total = 0j
    for k, ck in enumerate(c):
        total += complex(ck) * (-1.0) ** k * phi(0.0, k)
    return total


def evaluate_extension(ext: Extension, phi: TestFunction,
                       schedule: Schedule = DEFAULT_SCHEDULE,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> ExtensionResult:
    """Evaluate (Tbar, phibar) + counterterms; the pairing must converge."""
    phibar = SubtractedFunction(phi, ext.omega, ext.p) if ext.subtract else phi
    pairing = limit_pairing(ext.expr, phibar, schedule, tol)
    if pairing.status != "converged":
        raise ExtensionError(
            f"subtracted pairing for {ext.expr.label!r} classified as "
            f"{pairing.status}; the declared order p={ext.p} is too small or the "
            "expression is outside scope",
            pairing,
        )
    ct = counterterm_value(ext.c, phi)
    return ExtensionResult(pairing.value + ct, pairing.value, ct, pairing)


# ---------------------------------------------------------------------------
# independence and identity checks
# ---------------------------------------------------------------------------


def omega_independence_check(expr: ProductExpression, p: int, phi: TestFunction,
                             omega1: PlateauCutoff, omega2: PlateauCutoff,
                             schedule: Schedule = DEFAULT_SCHEDULE,
                             tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """|value with omega1 - value with omega2| at c = 0."""
    if (omega1.plateau, omega1.support) == (omega2.plateau, omega2.support):
        raise ValueError("cutoffs must have different geometry")
    v1 = evaluate_extension(Extension.minimal(expr, p, omega1), phi, schedule, tol)
    v2 = evaluate_extension(Extension.minimal(expr, p, omega2), phi, schedule, tol)
    return abs(v1.value - v2.value)


@dataclass(frozen=True)
class FactorizationReport:
    lhs_value: complex | None
    rhs_value: complex | None
    lhs_status: str
    rhs_status: str
    difference: float | None
    tolerance: float
    ok: bool


def factorization_identity_check(expr: ProductExpression, kappa: int,
                                 psi: TestFunction,
                                 schedule: Schedule = DEFAULT_SCHEDULE,
                                 tol: Tolerances = DEFAULT_TOLERANCES,
                                 atol: float = 1e-7) -> FactorizationReport:
    """(T, x^(kappa+1) psi) versus (x^(kappa+1) T, psi).

    The left side pairs the expression with the probe x^(kappa+1)*psi; the
    right side moves the monomial into the expression's prefactor power.
    Either side failing to converge is reported via the status flags, not
    raised.
    """
    lhs = limit_pairing(expr, vanish_probe(kappa, psi), schedule, tol)
    rhs = limit_pairing(expr.with_extra_power(kappa + 1), psi, schedule, tol)
    diff = None
    ok = False
    if lhs.status == "converged" and rhs.status == "converged":
        diff = abs(lhs.value - rhs.value)
        ok = diff <= atol
    return FactorizationReport(lhs.value, rhs.value, lhs.status, rhs.status,
                               diff, atol, ok)


# ---------------------------------------------------------------------------
# the counterterm family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    c: tuple[complex, ...]
    phi_index: int
    value: complex
    offset: complex
    predicted: complex
    discrepancy: float
    ok: bool


@dataclass(frozen=True)
class NonuniquenessTable:
    rows: tuple[ScanRow, ...]

    @property
    def max_discrepancy(self) -> float:
        return max((r.discrepancy for r in self.rows), default=0.0)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)


def nonuniqueness_scan(ext: Extension, c_grid, phis,
                       schedule: Schedule = DEFAULT_SCHEDULE,
                       tol: Tolerances = DEFAULT_TOLERANCES,
                       rtol: float = 1e-12) -> NonuniquenessTable:
    """Tabulate the continuation over a counterterm grid.

    For each test function the subtracted pairing is computed once (it does
    not depend on c); each row's offset from the c = 0 row is then checked
    against the predicted counterterm sum.  The ambiguity of the continuation
    is exactly the span of delta derivatives through order p.
    """
    base = [evaluate_extension(ext.with_counterterms((0j,) * (ext.p + 1)), phi,
                               schedule, tol)
            for phi in phis]
    rows = []
    for c in c_grid:
        c = tuple(complex(v) for v in c)
        if len(c) != ext.p + 1:
            raise ValueError(f"grid entry {c} has wrong length for p={ext.p}")
        for i, phi in enumerate(phis):
            predicted = counterterm_value(c, phi)
            value = base[i].tbar_phibar + predicted
            offset = value - base[i].value
            disc = abs(offset - predicted)
            rows.append(ScanRow(
                c, i, value, offset, predicted, disc,
                bool(disc <= rtol * (1.0 + abs(predicted))),
            ))
    return NonuniquenessTable(tuple(rows))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _cpair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def extension_report(ext: Extension, result: ExtensionResult) -> dict:
    return {
        "p": int(ext.p),
        "c": [_cpair(v) for v in ext.c],
        "omega": {"plateau": float(ext.omega.plateau),
                  "support": float(ext.omega.support)},
        "value": _cpair(result.value),
        "Tbar_phibar": _cpair(result.tbar_phibar),
        "counterterm_part": _cpair(result.counterterm_part),
    }
