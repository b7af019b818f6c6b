"""Truncated polynomials in the time variables ``t[alpha,k]`` over exact rationals."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator

import gmpy2

from ..errors import ConfigurationError
from .kernels import DEG_BITS, DEG_MASK, EXP_BITS, MAX_EXACT_DEGREE, add_terms, mul_terms, scale_terms

Q = gmpy2.mpq
_EXP_MASK = (1 << EXP_BITS) - 1
_COPY_NAMES = ("t", "tp")


def rational(num, den=1):
    """Exact rational from ints, strings like ``"-3/2"``, Fractions or mpq."""
    if isinstance(num, str):
        return Q(num.strip())
    return Q(num, den) if den != 1 else Q(num)


@dataclass(frozen=True)
class TimeSpace:
    """The variable universe ``{t[alpha,k] : alpha <= N, k <= K}``, optionally doubled.

    ``degree_cap`` bounds the total degree in each alphabet copy separately;
    ``None`` means no truncation.
    """

    n_components: int
    max_order: int
    copies: int = 1
    degree_cap: int | None = None

    def __post_init__(self):
        if self.n_components < 1 or self.max_order < 0 or self.copies not in (1, 2):
            raise ConfigurationError(f"invalid time space {self}")
        if self.degree_cap is not None and not 0 <= self.degree_cap <= MAX_EXACT_DEGREE:
            raise ConfigurationError(f"degree cap must lie in [0, {MAX_EXACT_DEGREE}]")

    @cached_property
    def nvars(self) -> int:
        return self.copies * self.n_components * self.max_order

    @cached_property
    def deg_shift(self) -> int:
        return EXP_BITS * self.nvars

    def index(self, alpha: int, k: int, copy: int = 0) -> int:
        if not (1 <= alpha <= self.n_components and 1 <= k <= self.max_order and 0 <= copy < self.copies):
            raise ConfigurationError(f"t[{alpha},{k}] (copy {copy}) is outside {self}")
        return (copy * self.n_components + alpha - 1) * self.max_order + k - 1

    def label(self, i: int) -> tuple[int, int, int]:
        """(copy, alpha, k) of variable index ``i``."""
        copy, rest = divmod(i, self.n_components * self.max_order)
        a, k = divmod(rest, self.max_order)
        return copy, a + 1, k + 1

    def var_key(self, i: int) -> int:
        copy = i // (self.n_components * self.max_order)
        return (1 << (EXP_BITS * i)) | (1 << (self.deg_shift + DEG_BITS * copy))

    def var(self, alpha: int, k: int, copy: int = 0) -> "TimePolynomial":
        i = self.index(alpha, k, copy)
        if self.degree_cap == 0:
            return TimePolynomial(self)
        return TimePolynomial(self, {self.var_key(i): Q(1)})

    def const(self, c) -> "TimePolynomial":
        c = rational(c)
        return TimePolynomial(self, {0: c} if c else {})

    @property
    def zero(self) -> "TimePolynomial":
        return TimePolynomial(self)

    @property
    def one(self) -> "TimePolynomial":
        return self.const(1)

    def with_cap(self, cap: int | None) -> "TimeSpace":
        return TimeSpace(self.n_components, self.max_order, self.copies, cap)

    def doubled(self) -> "TimeSpace":
        return TimeSpace(self.n_components, self.max_order, 2, self.degree_cap)

    def decode(self, key: int) -> list[int]:
        return [(key >> (EXP_BITS * i)) & _EXP_MASK for i in range(self.nvars)]

    def encode(self, exps) -> int:
        key = 0
        per_copy = [0] * self.copies
        block = self.n_components * self.max_order
        for i, e in enumerate(exps):
            if e:
                key |= e << (EXP_BITS * i)
                per_copy[i // block] += e
        for c, d in enumerate(per_copy):
            key |= d << (self.deg_shift + DEG_BITS * c)
        return key

    def copy_degree(self, key: int, copy: int = 0) -> int:
        return (key >> (self.deg_shift + DEG_BITS * copy)) & DEG_MASK

    def variables(self) -> Iterator[tuple[int, int, int]]:
        for i in range(self.nvars):
            yield self.label(i)


@lru_cache(maxsize=None)
def _index_map(src: TimeSpace, dst: TimeSpace, copy_map: tuple) -> tuple:
    cmap = dict(copy_map)
    out = []
    for i in range(src.nvars):
        copy, a, k = src.label(i)
        c2 = cmap.get(copy, copy if not copy_map else None)
        if c2 is None or c2 >= dst.copies or a > dst.n_components or k > dst.max_order:
            out.append(None)
        else:
            out.append(dst.index(a, k, c2))
    return tuple(out)


class TimePolynomial:
    """Exact polynomial in the variables of a :class:`TimeSpace`.

    Values are immutable; every operation returns a new polynomial reduced
    modulo the space's degree cap.
    """

    __slots__ = ("space", "terms")

    def __init__(self, space: TimeSpace, terms: dict | None = None):
        self.space = space
        self.terms = terms if terms is not None else {}

    # -- arithmetic -------------------------------------------------------
    def _other(self, other) -> "TimePolynomial":
        if isinstance(other, TimePolynomial):
            if other.space != self.space:
                raise ConfigurationError(f"mismatched time spaces: {self.space} vs {other.space}")
            return other
        return self.space.const(other)

    def __add__(self, other):
        o = self._other(other)
        return TimePolynomial(self.space, add_terms(self.terms, o.terms))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return TimePolynomial(self.space, add_terms(self.terms, o.terms, -1))

    def __rsub__(self, other):
        return self._other(other) - self

    def __neg__(self):
        return TimePolynomial(self.space, {k: -v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, TimePolynomial):
            o = self._other(other)
            sp = self.space
            return TimePolynomial(sp, mul_terms(self.terms, o.terms, sp.deg_shift, sp.copies, sp.degree_cap))
        return TimePolynomial(self.space, scale_terms(self.terms, rational(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TimePolynomial):
            return self * other.inverse()
        return self * (Q(1) / rational(other))

    def __pow__(self, n: int):
        out = self.space.one
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, TimePolynomial):
            return self.space == other.space and self.terms == other.terms
        try:
            return self.terms == self.space.const(other).terms
        except (TypeError, ValueError):
            return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def constant_term(self):
        return self.terms.get(0, Q(0))

    def degree(self, copy: int | None = None) -> int:
        if not self.terms:
            return -1
        sp = self.space
        copies = range(sp.copies) if copy is None else (copy,)
        return max(sum(sp.copy_degree(k, c) for c in copies) for k in self.terms)

    # -- calculus ---------------------------------------------------------
    def derivative(self, alpha: int, k: int, copy: int = 0) -> "TimePolynomial":
        sp = self.space
        i = sp.index(alpha, k, copy)
        shift = EXP_BITS * i
        drop = sp.var_key(i)
        out = {}
        for key, c in self.terms.items():
            e = (key >> shift) & _EXP_MASK
            if e:
                out[key - drop] = c * e
        return TimePolynomial(sp, out)

    def truncate(self, cap: int | None) -> "TimePolynomial":
        """Same polynomial reinterpreted in the space with degree cap ``cap``."""
        sp = self.space.with_cap(cap)
        if cap is None:
            return TimePolynomial(sp, dict(self.terms))
        terms = {k: c for k, c in self.terms.items()
                 if all(sp.copy_degree(k, j) <= cap for j in range(sp.copies))}
        return TimePolynomial(sp, terms)

    def restrict(self, target: TimeSpace, copy_map: dict | None = None) -> "TimePolynomial":
        """Map into ``target``; variables absent there are set to zero.

        ``copy_map`` renames alphabet copies, e.g. ``{0: 1}`` sends ``t`` to ``t'``.
        """
        src = self.space
        cm = tuple(sorted(copy_map.items())) if copy_map else ()
        imap = _index_map(src, target, cm)
        cap = target.degree_cap
        block = target.n_components * target.max_order
        out = {}
        for key, c in self.terms.items():
            new = [0] * target.nvars
            ok = True
            i = 0
            while key >> (EXP_BITS * i) and i < src.nvars:
                e = (key >> (EXP_BITS * i)) & _EXP_MASK
                if e:
                    j = imap[i]
                    if j is None:
                        ok = False
                        break
                    new[j] += e
                i += 1
            if not ok:
                continue
            if cap is not None:
                per = [0] * target.copies
                for j, e in enumerate(new):
                    if e:
                        per[j // block] += e
                if max(per) > cap:
                    continue
            k2 = target.encode(new)
            out[k2] = out.get(k2, Q(0)) + c
        return TimePolynomial(target, {k: v for k, v in out.items() if v})

    def inverse(self) -> "TimePolynomial":
        """Power-series inverse modulo the degree cap."""
        c0 = self.constant_term
        if not c0:
            from ..errors import NormalizationError

            raise NormalizationError("series inverse of a polynomial with zero constant term")
        inv0 = Q(1) / c0
        rest = self * inv0 - 1
        if rest.is_zero():
            return self.space.const(inv0)
        if self.space.degree_cap is None:
            raise ConfigurationError("series inverse needs a finite degree cap")
        out = self.space.one
        term = self.space.one
        neg = -rest
        while True:
            term = term * neg
            if term.is_zero():
                break
            out = out + term
        return out * inv0

    def substitute_zero(self) -> "TimePolynomial":
        return self.space.const(self.constant_term)

    # -- presentation -----------------------------------------------------
    def monomials(self):
        """Sorted ``(exponent vector, coefficient)`` pairs."""
        sp = self.space
        items = [(sp.decode(k), c) for k, c in self.terms.items()]
        items.sort(key=lambda it: (sum(it[0]), [-e for e in it[0]]))
        return items

    def coefficient(self, exps) -> object:
        return self.terms.get(self.space.encode(exps), Q(0))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        sp = self.space
        parts = []
        for exps, c in self.monomials():
            factors = []
            for i, e in enumerate(exps):
                if e:
                    copy, a, k = sp.label(i)
                    name = f"{_COPY_NAMES[copy]}[{a},{k}]"
                    factors.append(name if e == 1 else f"{name}^{e}")
            mono = "*".join(factors)
            neg = c < 0
            mag = -c if neg else c
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"TimePolynomial({self.to_text()!r})"
