"""Matrix pseudo-difference operators ``sum_k c_k(p) e^{-k d/dp}`` over a finite p-window.

An operator stores, for each shift exponent ``k`` (the power of ``e^{-d_p}``),
a table ``p -> N x N matrix`` of time polynomials.  ``order`` records how far the
operator is known: coefficients with ``k > order`` are unknown, not zero
(``order=None`` means the stored finite sum is the whole operator).  Composition
derives the order and the surviving p-window of its result, so an identity
checked through ``result.order`` on ``result.window`` is exact.
"""
from __future__ import annotations

from typing import Callable

from .algebra.laurent import LaurentPolynomial
from .algebra.timepoly import TimePolynomial, TimeSpace
from .errors import ConfigurationError

CONST = None  # p-key of a p-independent coefficient


# -- matrices of time polynomials ------------------------------------------

def mat_zero(space: TimeSpace, n: int):
    z = space.zero
    return tuple(tuple(z for _ in range(n)) for _ in range(n))


def mat_identity(space: TimeSpace, n: int):
    return mat_unit(space, n, None)


def mat_unit(space: TimeSpace, n: int, alpha: int | None):
    """``E_alpha`` (1 at (alpha, alpha)), or the identity for ``alpha=None``."""
    z, o = space.zero, space.one
    return tuple(tuple(o if i == j and (alpha is None or i + 1 == alpha) else z for j in range(n))
                 for i in range(n))


def mat_add(a, b, sign=1):
    if sign == 1:
        return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_mul(a, b):
    n = len(a)
    zero = a[0][0] * 0
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = zero
            for k in range(n):
                x, y = a[i][k], b[k][j]
                if x and y:
                    acc = acc + x * y
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def mat_map(a, fn: Callable):
    return tuple(tuple(fn(x) for x in row) for row in a)


def mat_is_zero(a) -> bool:
    return all(not x for row in a for x in row)


def mat_equal(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def mat_text(a) -> str:
    return "[" + "; ".join(", ".join(x.to_text() for x in row) for row in a) + "]"


# -- operators -------------------------------------------------------------

def _min_order(*orders):
    vals = [o for o in orders if o is not None]
    return min(vals) if vals else None


class PseudoDiffOp:
    __slots__ = ("n", "space", "terms", "window", "order")

    def __init__(self, n: int, space: TimeSpace, terms: dict, window: tuple | None = None,
                 order: int | None = None):
        self.n = n
        self.space = space
        self.window = window
        self.order = order
        clean = {}
        for k, table in terms.items():
            if order is not None and k > order:
                continue
            table = {p: m for p, m in table.items() if not mat_is_zero(m)}
            if window is not None:
                table = {p: m for p, m in table.items() if window[0] <= p <= window[1]}
            if table:
                clean[k] = table
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def identity(cls, n: int, space: TimeSpace) -> "PseudoDiffOp":
        return cls(n, space, {0: {CONST: mat_identity(space, n)}})

    @classmethod
    def shift(cls, n: int, space: TimeSpace, m: int, matrix=None) -> "PseudoDiffOp":
        """``matrix * e^{m d_p}`` (stored at ``k = -m``)."""
        return cls(n, space, {-m: {CONST: matrix if matrix is not None else mat_identity(space, n)}})

    @classmethod
    def multiplication(cls, table: dict, n: int, space: TimeSpace) -> "PseudoDiffOp":
        """The operator of left multiplication by ``u(p)`` given as ``{p: matrix}``."""
        ps = sorted(table)
        return cls(n, space, {0: dict(table)}, (ps[0], ps[-1]))

    # -- access ---------------------------------------------------------------
    @property
    def constant(self) -> bool:
        return self.window is None

    @property
    def low(self) -> int:
        """Lowest shift exponent that can carry a nonzero coefficient."""
        if not self.terms:
            return 0 if self.order is None else self.order + 1
        return min(self.terms)

    @property
    def high(self) -> int:
        return max(self.terms, default=0)

    def coef(self, k: int, p: int):
        table = self.terms.get(k)
        if table is None:
            return None
        if self.window is None:
            return table.get(CONST)
        return table.get(p)

    def defined_at(self, p: int) -> bool:
        return self.window is None or self.window[0] <= p <= self.window[1]

    def ps(self):
        if self.window is None:
            raise ConfigurationError("a constant operator has no finite p-window")
        return range(self.window[0], self.window[1] + 1)

    def _same(self, other):
        if other.n != self.n or other.space != self.space:
            raise ConfigurationError("operators of different size or time space")

    # -- algebra ------------------------------------------------------------
    def __add__(self, other: "PseudoDiffOp") -> "PseudoDiffOp":
        return _combine(self, other, 1)

    def __sub__(self, other: "PseudoDiffOp") -> "PseudoDiffOp":
        return _combine(self, other, -1)

    def __neg__(self):
        return self.map_coeffs(lambda c: -c)

    def __matmul__(self, other):
        return pdo_mul(self, other)

    def map_coeffs(self, fn) -> "PseudoDiffOp":
        return PseudoDiffOp(self.n, self.space,
                            {k: {p: mat_map(m, fn) for p, m in t.items()} for k, t in self.terms.items()},
                            self.window, self.order)

    def derivative(self, alpha: int, k: int) -> "PseudoDiffOp":
        return self.map_coeffs(lambda c: c.derivative(alpha, k))

    def truncate(self, order: int | None = None, degree: int | None = None, window=None) -> "PseudoDiffOp":
        space = self.space.with_cap(degree) if degree is not None else self.space
        order = _min_order(order, self.order)
        terms = {k: {p: (mat_map(m, lambda c: c.truncate(degree)) if degree is not None else m)
                     for p, m in t.items()} for k, t in self.terms.items()}
        win = self.window
        if window is not None:
            if win is None:
                # spread p-independent coefficients over the requested window
                terms = {k: {p: t[CONST] for p in range(window[0], window[1] + 1)} for k, t in terms.items()}
                win = window
            else:
                win = (max(win[0], window[0]), min(win[1], window[1]))
        return PseudoDiffOp(self.n, space, terms, win, order)

    def is_zero(self) -> bool:
        return not self.terms

    def equals(self, other: "PseudoDiffOp", through: int | None = None) -> bool:
        """Coefficient-exact equality on the common window for ``k <= through``."""
        diff = self - other
        if through is not None:
            diff = diff.truncate(order=through)
        return diff.is_zero()

    def to_text(self) -> str:
        lines = [f"# N={self.n} window={self.window} order={self.order}"]
        for k in sorted(self.terms):
            for p in sorted(self.terms[k], key=lambda x: (x is not None, x)):
                lines.append(f"e^({-k}dp) p={'*' if p is None else p}: {mat_text(self.terms[k][p])}")
        return "\n".join(lines)


def _join_window(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return (max(a[0], b[0]), min(a[1], b[1]))


def _check_window(win, what):
    if win is not None and win[0] > win[1]:
        raise ConfigurationError(f"p-window exhausted in {what}; enlarge the tau table p-range")


def _combine(a: PseudoDiffOp, b: PseudoDiffOp, sign: int) -> PseudoDiffOp:
    a._same(b)
    win = _join_window(a.window, b.window)
    _check_window(win, "operator sum")
    order = _min_order(a.order, b.order)
    ks = set(a.terms) | set(b.terms)
    ps = [CONST] if win is None else list(range(win[0], win[1] + 1))
    terms = {}
    for k in ks:
        table = {}
        for p in ps:
            x, y = a.coef(k, p), b.coef(k, p)
            if x is None and y is None:
                continue
            if x is None:
                table[p] = y if sign == 1 else mat_map(y, lambda c: -c)
            elif y is None:
                table[p] = x
            else:
                table[p] = mat_add(x, y, sign)
        terms[k] = table
    return PseudoDiffOp(a.n, a.space, terms, win, order)


def pdo_mul(A: PseudoDiffOp, B: PseudoDiffOp, k_trunc: int | None = None) -> PseudoDiffOp:
    """``(AB)(p) = sum_m [sum_k A_k(p) B_{m-k}(p-k)] e^{-m d_p}``."""
    A._same(B)
    inf = float("inf")
    oa = inf if A.order is None else A.order
    ob = inf if B.order is None else B.order
    order = min(oa + B.low, ob + A.low)
    if k_trunc is not None:
        order = min(order, k_trunc)
    order = None if order == inf else int(order)
    kmax_a = A.high if order is None else min(A.high, order - B.low)
    ka = [k for k in A.terms if k <= kmax_a]
    if A.window is None and B.window is None:
        win = None
    elif not ka:
        win = _join_window(A.window, B.window)
    else:
        lo, hi = -inf, inf
        if A.window is not None:
            lo, hi = A.window
        if B.window is not None and ka:
            lo = max(lo, B.window[0] + max(ka))
            hi = min(hi, B.window[1] + min(ka))
        if lo == -inf or hi == inf:
            raise ConfigurationError("cannot infer a finite p-window for the product")
        win = (int(lo), int(hi))
        if win[0] > win[1]:
            raise ConfigurationError(
                f"p-window exhausted composing operators (needs B on p-k for k in {sorted(ka)}); "
                "enlarge the tau table p-range")
    ps = [CONST] if win is None else range(win[0], win[1] + 1)
    terms: dict = {}
    for p in ps:
        for k in ka:
            a = A.coef(k, p)
            if a is None:
                continue
            for j in B.terms:
                m = k + j
                if order is not None and m > order:
                    continue
                b = B.coef(j, p - k if p is not CONST else 0)
                if b is None:
                    continue
                prod = mat_mul(a, b)
                table = terms.setdefault(m, {})
                table[p] = mat_add(table[p], prod) if p in table else prod
    return PseudoDiffOp(A.n, A.space, terms, win, order)


def pdo_project(A: PseudoDiffOp, part: str) -> PseudoDiffOp:
    """``A_+`` keeps ``e^{m d_p}`` with ``m >= 0``; ``A_-`` keeps the strictly negative powers."""
    if part == "+":
        if A.order is not None and A.order < 0:
            raise ConfigurationError("operator not known through shift order 0")
        return PseudoDiffOp(A.n, A.space, {k: t for k, t in A.terms.items() if k <= 0}, A.window, None)
    if part == "-":
        return PseudoDiffOp(A.n, A.space, {k: t for k, t in A.terms.items() if k > 0}, A.window, A.order)
    raise ValueError("part must be '+' or '-'")


def pdo_invert(A: PseudoDiffOp, k_trunc: int | None = None) -> PseudoDiffOp:
    """Order-by-order solution ``X`` of ``A X = I`` for ``A = I + O(e^{-d_p})``."""
    order = _min_order(A.order, k_trunc)
    if order is None:
        raise ConfigurationError("inverse of an untruncated operator needs k_trunc")
    if any(k < 0 for k in A.terms):
        raise ConfigurationError("leading term must be the identity at shift 0")
    ident = mat_identity(A.space, A.n)
    if A.window is None:
        ps_all = [CONST]
    else:
        ps_all = list(A.ps())
    for p in ps_all:
        c0 = A.coef(0, p if p is not CONST else 0)
        if c0 is None or not mat_equal(c0, ident):
            raise ConfigurationError("leading term must be the identity at shift 0")
    if A.window is None:
        X = {0: {CONST: ident}}
        for m in range(1, order + 1):
            acc = None
            for k in range(1, m + 1):
                a = A.coef(k, 0)
                x = X.get(m - k, {}).get(CONST)
                if a is None or x is None:
                    continue
                prod = mat_mul(a, x)
                acc = prod if acc is None else mat_add(acc, prod)
            if acc is not None:
                X[m] = {CONST: mat_map(acc, lambda c: -c)}
        return PseudoDiffOp(A.n, A.space, X, None, order)
    lo, hi = A.window
    X = {0: {p: ident for p in range(lo, hi + 1)}}
    for m in range(1, order + 1):
        table = {}
        for p in range(lo + m, hi + 1):
            acc = None
            for k in range(1, m + 1):
                a = A.coef(k, p)
                x = X.get(m - k, {}).get(p - k)
                if a is None or x is None:
                    continue
                prod = mat_mul(a, x)
                acc = prod if acc is None else mat_add(acc, prod)
            if acc is not None:
                table[p] = mat_map(acc, lambda c: -c)
        X[m] = table
    if lo + order > hi:
        raise ConfigurationError(f"p-window {A.window} too small to invert through order {order}")
    return PseudoDiffOp(A.n, A.space, X, (lo + order, hi), order)


# -- wave symbol families --------------------------------------------------

class WaveSymbolFamily:
    """``p -> N x N`` matrix of Laurent polynomials in ``z`` (a BA function or its adjoint)."""

    __slots__ = ("n", "space", "values")

    def __init__(self, n: int, space: TimeSpace, values: dict):
        self.n = n
        self.space = space
        self.values = values

    def __getitem__(self, p):
        return self.values[p]

    def ps(self):
        return sorted(self.values)

    def map(self, fn) -> "WaveSymbolFamily":
        return WaveSymbolFamily(self.n, self.space, {p: lmat_map(m, fn) for p, m in self.values.items()})

    def __sub__(self, other: "WaveSymbolFamily") -> "WaveSymbolFamily":
        common = sorted(set(self.values) & set(other.values))
        return WaveSymbolFamily(self.n, self.space,
                                {p: lmat_add(self.values[p], other.values[p], -1) for p in common})

    def __add__(self, other: "WaveSymbolFamily") -> "WaveSymbolFamily":
        common = sorted(set(self.values) & set(other.values))
        return WaveSymbolFamily(self.n, self.space,
                                {p: lmat_add(self.values[p], other.values[p]) for p in common})

    def is_zero(self) -> bool:
        return all(not x for m in self.values.values() for row in m for x in row)


def lmat_map(a, fn):
    return tuple(tuple(fn(x) for x in row) for row in a)


def lmat_add(a, b, sign=1):
    if sign == 1:
        return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def poly_times_lmat(c, F):
    """Matrix of polynomials times matrix of Laurent polynomials."""
    n = len(c)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = F[0][j] * 0
            for k in range(n):
                if c[i][k]:
                    acc = acc + F[k][j] * c[i][k]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def lmat_times_poly(F, c):
    n = len(c)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = F[i][0] * 0
            for k in range(n):
                if c[k][j]:
                    acc = acc + F[i][k] * c[k][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def pdo_apply(A: PseudoDiffOp, F: WaveSymbolFamily) -> WaveSymbolFamily:
    """``(A F)(p) = sum_k A_k(p) F(p - k)`` wherever every needed ``F(p-k)`` exists."""
    out = {}
    for p in F.ps():
        if not A.defined_at(p):
            continue
        if any(p - k not in F.values for k in A.terms):
            continue
        acc = None
        for k in A.terms:
            c = A.coef(k, p)
            if c is None:
                continue
            term = poly_times_lmat(c, F[p - k])
            acc = term if acc is None else lmat_add(acc, term)
        if acc is None:
            acc = lmat_map(F[p], lambda x: x * 0)
        out[p] = acc
    if not out:
        raise ConfigurationError("p-window exhausted applying an operator to a wave family")
    return WaveSymbolFamily(F.n, F.space, out)


def pdo_left_apply(F: WaveSymbolFamily, A: PseudoDiffOp) -> WaveSymbolFamily:
    """``(F A)(p) = sum_k F(p + k) A_k(p + k)``, using ``f e^{-d_p} = e^{d_p} f``."""
    out = {}
    for p in F.ps():
        if any(p + k not in F.values or not A.defined_at(p + k) for k in A.terms):
            continue
        acc = None
        for k in A.terms:
            c = A.coef(k, p + k)
            if c is None:
                continue
            term = lmat_times_poly(F[p + k], c)
            acc = term if acc is None else lmat_add(acc, term)
        if acc is None:
            acc = lmat_map(F[p], lambda x: x * 0)
        out[p] = acc
    if not out:
        raise ConfigurationError("p-window exhausted applying an operator from the left")
    return WaveSymbolFamily(F.n, F.space, out)


def z_power_family(n: int, space: TimeSpace, ps, matrix=None, symbol="z") -> WaveSymbolFamily:
    """``F(p) = z^p * matrix`` (identity by default)."""
    vals = {}
    for p in ps:
        m = matrix if matrix is not None else mat_identity(space, n)
        vals[p] = tuple(tuple(LaurentPolynomial.monomial(symbol, space, p, c) if c else
                              LaurentPolynomial(symbol, space) for c in row) for row in m)
    return WaveSymbolFamily(n, space, vals)
