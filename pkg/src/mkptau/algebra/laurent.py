"""Finite Laurent polynomials in formal spectral symbols with time-polynomial coefficients."""
from __future__ import annotations

from ..errors import ConfigurationError
from .timepoly import TimePolynomial, TimeSpace, rational

SYMBOLS = ("z", "mu", "nu")


def _key(e, n):
    if isinstance(e, int):
        if n != 1:
            raise ConfigurationError("integer exponent given for a multi-symbol Laurent polynomial")
        return (e,)
    e = tuple(e)
    if len(e) != n:
        raise ConfigurationError("exponent arity does not match the symbols")
    return e


class LaurentPolynomial:
    """Sum of ``coeff * z^e`` (or ``mu^i nu^j``) with :class:`TimePolynomial` coefficients.

    ``floor`` gives, per symbol, the lowest retained exponent (``None``: no bound).
    Terms falling below it are dropped by every operation.
    """

    __slots__ = ("symbols", "space", "coeffs", "floor")

    def __init__(self, symbols, space: TimeSpace, coeffs: dict | None = None, floor=None):
        if isinstance(symbols, str):
            symbols = (symbols,)
        for s in symbols:
            if s not in SYMBOLS:
                raise ConfigurationError(f"unknown spectral symbol {s!r}")
        self.symbols = tuple(symbols)
        self.space = space
        if floor is None or isinstance(floor, int):
            floor = (floor,) * len(self.symbols)
        self.floor = tuple(floor)
        out = {}
        for e, c in (coeffs or {}).items():
            e = _key(e, len(self.symbols))
            if c.space != space:
                raise ConfigurationError("coefficient lives in a different time space")
            if c and self._kept(e):
                out[e] = c
        self.coeffs = out

    def _kept(self, e) -> bool:
        return all(f is None or x >= f for x, f in zip(e, self.floor))

    @classmethod
    def monomial(cls, symbols, space, exps, coeff=None, floor=None) -> "LaurentPolynomial":
        if coeff is None:
            coeff = space.one
        elif not isinstance(coeff, TimePolynomial):
            coeff = space.const(coeff)
        n = 1 if isinstance(symbols, str) else len(symbols)
        return cls(symbols, space, {_key(exps, n): coeff}, floor)

    @classmethod
    def from_poly(cls, poly: TimePolynomial, symbols="z", floor=None) -> "LaurentPolynomial":
        n = 1 if isinstance(symbols, str) else len(symbols)
        return cls(symbols, poly.space, {(0,) * n: poly}, floor)

    # -- structure --------------------------------------------------------
    def _check(self, other: "LaurentPolynomial"):
        if other.symbols != self.symbols:
            raise ConfigurationError(f"cross-symbol arithmetic: {self.symbols} vs {other.symbols}")
        if other.space != self.space:
            raise ConfigurationError("mismatched time spaces")

    def _join_floor(self, other):
        out = []
        for a, b in zip(self.floor, other.floor):
            out.append(b if a is None else a if b is None else max(a, b))
        return tuple(out)

    def _lift(self, other) -> "LaurentPolynomial":
        if isinstance(other, LaurentPolynomial):
            self._check(other)
            return other
        if not isinstance(other, TimePolynomial):
            other = self.space.const(other)
        return LaurentPolynomial.from_poly(other, self.symbols)

    def coefficient(self, e) -> TimePolynomial:
        return self.coeffs.get(_key(e, len(self.symbols)), self.space.zero)

    def exponents(self):
        return sorted(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, LaurentPolynomial):
            return self.symbols == other.symbols and self.coeffs.keys() == other.coeffs.keys() and all(
                self.coeffs[e] == other.coeffs[e] for e in self.coeffs)
        return self == self._lift(other)

    __hash__ = None

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        out = dict(self.coeffs)
        for e, c in o.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPolynomial(self.symbols, self.space, out, self._join_floor(o))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(self.symbols, self.space, {e: -c for e, c in self.coeffs.items()}, self.floor)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            if isinstance(other, TimePolynomial):
                return LaurentPolynomial(self.symbols, self.space,
                                         {e: c * other for e, c in self.coeffs.items()}, self.floor)
            q = rational(other)
            return LaurentPolynomial(self.symbols, self.space,
                                     {e: c * q for e, c in self.coeffs.items()}, self.floor)
        self._check(other)
        floor = self._join_floor(other)
        out = {}
        for ea, ca in self.coeffs.items():
            for eb, cb in other.coeffs.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if any(f is not None and x < f for x, f in zip(e, floor)):
                    continue
                p = ca * cb
                if p:
                    out[e] = out[e] + p if e in out else p
        return LaurentPolynomial(self.symbols, self.space, out, floor)

    __rmul__ = __mul__

    def shift(self, exps) -> "LaurentPolynomial":
        """Multiply by ``symbol**exps``."""
        d = _key(exps, len(self.symbols))
        return LaurentPolynomial(
            self.symbols, self.space,
            {tuple(x + y for x, y in zip(e, d)): c for e, c in self.coeffs.items()}, self.floor)

    def map_coeffs(self, fn) -> "LaurentPolynomial":
        sample = fn(self.space.zero)
        return LaurentPolynomial(self.symbols, sample.space,
                                 {e: fn(c) for e, c in self.coeffs.items()}, self.floor)

    def time_derivative(self, alpha: int, k: int, copy: int = 0) -> "LaurentPolynomial":
        return self.map_coeffs(lambda c: c.derivative(alpha, k, copy))

    def symbol_derivative(self, which: int = 0) -> "LaurentPolynomial":
        out = {}
        for e, c in self.coeffs.items():
            if e[which]:
                e2 = list(e)
                e2[which] -= 1
                out[tuple(e2)] = c * e[which]
        return LaurentPolynomial(self.symbols, self.space, out, self.floor)

    def truncate(self, cap: int | None = None, floor=None) -> "LaurentPolynomial":
        """Reduce coefficients to degree ``cap`` and drop exponents below ``floor``."""
        if floor is None:
            floor = self.floor
        elif isinstance(floor, int):
            floor = (floor,) * len(self.symbols)
        space = self.space.with_cap(cap) if cap is not None else self.space
        coeffs = {e: (c.truncate(cap) if cap is not None else c) for e, c in self.coeffs.items()}
        return LaurentPolynomial(self.symbols, space, coeffs, floor)

    def restrict(self, target: TimeSpace, copy_map=None) -> "LaurentPolynomial":
        return LaurentPolynomial(self.symbols, target,
                                 {e: c.restrict(target, copy_map) for e, c in self.coeffs.items()}, self.floor)

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            powers = "*".join(f"{s}^{x}" for s, x in zip(self.symbols, e) if x)
            body = f"({self.coeffs[e].to_text()})"
            parts.append(f"{body}*{powers}" if powers else body)
        return " + ".join(parts)

    def __repr__(self):
        return f"LaurentPolynomial({self.to_text()!r})"


def residue(L: LaurentPolynomial, symbol: str | None = None):
    """Formal residue: the coefficient of ``symbol**-1`` (no 2*pi*i factor).

    For a multi-symbol input the result is a Laurent polynomial in the remaining symbols.
    """
    if symbol is None:
        if len(L.symbols) != 1:
            raise ConfigurationError("name the symbol to take a residue in")
        return L.coefficient((-1,))
    i = L.symbols.index(symbol)
    if len(L.symbols) == 1:
        return L.coefficient((-1,))
    rest = L.symbols[:i] + L.symbols[i + 1:]
    out = {}
    for e, c in L.coeffs.items():
        if e[i] == -1:
            out[e[:i] + e[i + 1:]] = c
    return LaurentPolynomial(rest, L.space, out, L.floor[:i] + L.floor[i + 1:])


def residue_of_product(A: LaurentPolynomial, B: LaurentPolynomial, shift: int = 0,
                       space: TimeSpace | None = None, a_map=None, b_map=None) -> TimePolynomial:
    """``res_z z^shift A(z) B(z)`` without forming the whole product.

    When ``space`` is given, the coefficients of ``A`` and ``B`` are first moved
    into it with the copy maps ``a_map`` / ``b_map`` (e.g. ``{0: 1}`` to place
    ``B`` in the primed alphabet).
    """
    if A.symbols != B.symbols or len(A.symbols) != 1:
        raise ConfigurationError("residue_of_product needs two single-symbol Laurent polynomials")
    space = space or A.space
    out = space.zero
    target = -1 - shift
    for (ea,), ca in A.coeffs.items():
        cb = B.coeffs.get((target - ea,))
        if cb is None:
            continue
        if space is not A.space or a_map:
            ca = ca.restrict(space, a_map)
        if space is not B.space or b_map:
            cb = cb.restrict(space, b_map)
        out = out + ca * cb
    return out
