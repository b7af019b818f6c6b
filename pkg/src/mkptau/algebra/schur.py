"""Schur polynomials, Miwa shifts and the exponential of xi(t, z)."""
from __future__ import annotations

from math import comb
from typing import Sequence

from ..errors import ConfigurationError
from .laurent import LaurentPolynomial
from .kernels import EXP_BITS
from .timepoly import Q, TimePolynomial, TimeSpace


def schur(K: int, t: Sequence) -> list:
    """Elementary Schur polynomials ``h_0..h_K`` from ``exp(sum t_k z^k) = sum h_k z^k``.

    ``t[k-1]`` plays the role of ``t_k``; missing entries count as zero.
    Uses Newton's recursion ``n h_n = sum_k k t_k h_{n-k}``.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    if t and isinstance(t[0], TimePolynomial):
        one = t[0].space.one
    else:
        one = Q(1)
    h = [one]
    for n in range(1, K + 1):
        acc = None
        for k in range(1, min(n, len(t)) + 1):
            term = t[k - 1] * h[n - k] * k
            acc = term if acc is None else acc + term
        if acc is None:
            acc = one * 0
        h.append(acc * Q(1, n))
    return h


def schur_derivative_action(k: int, gamma: int, P: TimePolynomial, sign: int = 1, copy: int = 0) -> TimePolynomial:
    """``h_k(sign * d~_gamma) P`` with ``d~ = (d/dt1, d/dt2 / 2, d/dt3 / 3, ...)``."""
    return _derivative_tower(k, gamma, P, sign, copy)[k]


def _derivative_tower(kmax: int, gamma: int, P: TimePolynomial, sign: int, copy: int) -> list:
    sp = P.space
    H = [P]
    for n in range(1, kmax + 1):
        acc = sp.zero
        for j in range(1, min(n, sp.max_order) + 1):
            if H[n - j]:
                acc = acc + H[n - j].derivative(gamma, j, copy)
        H.append(acc * Q(sign, n))
    return H


def miwa_shift(P: TimePolynomial, gamma: int, sign: int, symbol: str = "z",
               z_max: int | None = None, copy: int = 0) -> LaurentPolynomial:
    """``P(t + sign*[symbol^-1]_gamma)``, i.e. ``t[gamma,k] -> t[gamma,k] + sign*symbol^-k/k``.

    Done by exact substitution; ``z_max`` drops powers below ``symbol^-z_max``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    sp = P.space
    K = sp.max_order
    idx = [sp.index(gamma, j, copy) for j in range(1, K + 1)]
    vkeys = [sp.var_key(i) for i in idx]
    shifts = [EXP_BITS * i for i in idx]
    steps = [Q(sign, j) for j in range(1, K + 1)]
    by_exp: dict[int, dict] = {}
    for key, c in P.terms.items():
        exps = [(key >> s) & 63 for s in shifts]
        base = key
        for e, vk in zip(exps, vkeys):
            if e:
                base -= e * vk
        # partial expansions: list of (key, zdepth, coeff)
        partial = [(base, 0, c)]
        for j, (e, vk, step) in enumerate(zip(exps, vkeys, steps), start=1):
            if not e:
                continue
            nxt = []
            for pk, depth, pc in partial:
                for i in range(e + 1):
                    d = depth + j * i
                    if z_max is not None and d > z_max:
                        break
                    nxt.append((pk + (e - i) * vk, d, pc * comb(e, i) * step ** i))
            partial = nxt
        for pk, depth, pc in partial:
            bucket = by_exp.setdefault(-depth, {})
            v = bucket.get(pk)
            bucket[pk] = pc if v is None else v + pc
    coeffs = {}
    for e, terms in by_exp.items():
        terms = {k: v for k, v in terms.items() if v}
        if terms:
            coeffs[(e,)] = TimePolynomial(sp, terms)
    return LaurentPolynomial(symbol, sp, coeffs, None if z_max is None else -z_max)


def miwa_shift_by_derivatives(P: TimePolynomial, gamma: int, sign: int, symbol: str = "z",
                              z_max: int | None = None, copy: int = 0) -> LaurentPolynomial:
    """Same Laurent polynomial as :func:`miwa_shift`, built from ``h_k(sign*d~) P``."""
    sp = P.space
    if z_max is None:
        # terminates: each tower step lowers weighted degree
        z_max = max((sum(j * e for j, e in _orders(sp, k, gamma, copy)) for k in P.terms), default=0)
    H = _derivative_tower(z_max, gamma, P, sign, copy)
    coeffs = {(-k,): h for k, h in enumerate(H) if h}
    return LaurentPolynomial(symbol, sp, coeffs, -z_max)


def _orders(sp: TimeSpace, key: int, gamma: int, copy: int):
    for j in range(1, sp.max_order + 1):
        yield j, (key >> (EXP_BITS * sp.index(gamma, j, copy))) & 63


def xi_times(space: TimeSpace, gamma: int, copy: int = 0, minus_copy: int | None = None, sign: int = 1) -> list:
    """Per-order coefficients of ``sign * xi(t_gamma - t'_gamma, z)`` as time polynomials."""
    out = []
    for k in range(1, space.max_order + 1):
        v = space.var(gamma, k, copy)
        if minus_copy is not None:
            v = v - space.var(gamma, k, minus_copy)
        out.append(v * sign)
    return out


def xi_exponential(dt: Sequence[TimePolynomial], symbol: str = "z", max_exp: int | None = None) -> LaurentPolynomial:
    """``exp(sum_k dt[k-1] z^k)`` expanded modulo the degree cap of the coefficients' space."""
    if not dt:
        raise ConfigurationError("xi_exponential needs at least one order")
    sp = dt[0].space
    if max_exp is None:
        if sp.degree_cap is None:
            raise ConfigurationError("an untruncated exponential needs max_exp")
        max_exp = sp.degree_cap * len(dt) * sp.copies
    h = schur(max_exp, list(dt))
    return LaurentPolynomial(symbol, sp, {(n,): c for n, c in enumerate(h) if c})
