"""Rational functions of one complex variable.

Coefficient lists are stored lowest order first, matching the convention of
``numpy.polynomial.polynomial``.  Everything here is exact-ish symbolic
bookkeeping on top of float coefficients: products, sums, derivatives and
structural cancellation of common powers of z.  No root-finding happens unless
``poles`` is asked for.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly


def _trim(c) -> np.ndarray:
    """Coerce to a complex coefficient array and drop trailing zeros."""
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if c.ndim != 1:
        raise ValueError("coefficient list must be one-dimensional")
    n = len(c)
    while n > 1 and c[n - 1] == 0.0:
        n -= 1
    return c[:n].copy()


class RationalFunction:
    """Quotient num(z)/den(z) of two polynomials.

    Instances behave as immutable values: arithmetic returns new objects and
    no method mutates the stored coefficient arrays.  On construction the
    representation is normalised by cancelling common factors of z (exact,
    purely structural: only stored zeros are cancelled) and scaling the
    denominator to be monic.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1.0,), normalize: bool = True):
        num = _trim(num)
        den = _trim(den)
        if len(den) == 1 and den[0] == 0.0:
            raise ZeroDivisionError("zero denominator polynomial")
        if normalize:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    # -- evaluation ------------------------------------------------------

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        val = npoly.polyval(z, self.num) / npoly.polyval(z, self.den)
        if val.ndim == 0:
            return complex(val)
        return val

    # -- calculus --------------------------------------------------------

    def deriv(self) -> "RationalFunction":
        """Derivative by the quotient rule, renormalised."""
        n, d = self.num, self.den
        top = npoly.polysub(
            npoly.polymul(npoly.polyder(n), d),
            npoly.polymul(n, npoly.polyder(d)),
        )
        return RationalFunction(top, npoly.polymul(d, d))

    # -- arithmetic ------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(
                npoly.polymul(self.num, other.num),
                npoly.polymul(self.den, other.den),
            )
        return RationalFunction(self.num * complex(other), self.den, normalize=False)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, RationalFunction):
            other = RationalFunction([complex(other)])
        return RationalFunction(
            npoly.polyadd(
                npoly.polymul(self.num, other.den),
                npoly.polymul(other.num, self.den),
            ),
            npoly.polymul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, normalize=False)

    def __sub__(self, other):
        return self + (-other if isinstance(other, RationalFunction) else -complex(other))

    # -- structure -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return len(self.num) == 1 and self.num[0] == 0.0

    @property
    def deg_num(self) -> int:
        return len(self.num) - 1

    @property
    def deg_den(self) -> int:
        return len(self.den) - 1

    def poles(self) -> np.ndarray:
        """Roots of the denominator (with multiplicity), empty if constant."""
        if self.deg_den == 0:
            return np.array([], dtype=complex)
        return np.roots(self.den[::-1])

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return np.array_equal(self.num, other.num) and np.array_equal(self.den, other.den)

    def __repr__(self):
        return f"RationalFunction(num={self.num.tolist()}, den={self.den.tolist()})"


def _normalize(num: np.ndarray, den: np.ndarray):
    if len(num) == 1 and num[0] == 0.0:
        return num, np.array([1.0 + 0j])
    # cancel z^k common to stored leading zeros of both coefficient lists
    k = 0
    kmax = min(len(num), len(den)) - 1
    while k < kmax and num[k] == 0.0 and den[k] == 0.0:
        k += 1
    if k:
        num = num[k:].copy()
        den = den[k:].copy()
    lead = den[-1]
    if lead != 1.0:
        num = num / lead
        den = den / lead
        den[-1] = 1.0
    return num, den
