"""Truncated N-component free fermions and tau-functions as vacuum expectation values.

Modes ``(alpha, j)`` with ``lo <= j < hi`` are packed into an occupancy bitmask,
bit ``(alpha-1)*(hi-lo) + (j-lo)``.  A basis state is the product of creation
operators ``psi_j`` in that (component-major, mode-ascending) order applied to
the empty reference state, which fixes every sign.  ``psi`` fills a mode and
``psi*`` empties it; the vacuum ``|0>`` has ``j < 0`` filled in every component.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .algebra.timepoly import Q, TimePolynomial, TimeSpace, rational
from .errors import ConfigurationError
from .tautable import TauTable

PSI = "psi"
PSI_STAR = "psi*"


@dataclass(frozen=True)
class ModeWindow:
    lo: int
    hi: int

    def __post_init__(self):
        if not self.lo < 0 <= self.hi:
            raise ConfigurationError(f"mode window [{self.lo},{self.hi}) must satisfy lo < 0 <= hi")

    @property
    def size(self) -> int:
        return self.hi - self.lo

    @property
    def max_hop(self) -> int:
        return self.size - 1

    def __contains__(self, j: int) -> bool:
        return self.lo <= j < self.hi

    def enlarged(self, by: int = 1) -> "ModeWindow":
        return ModeWindow(self.lo - by, self.hi + by)

    def exact_space(self, n_components: int, degree_cap: int | None = None) -> TimeSpace:
        """Time space containing every ``t[alpha,k]`` a current can couple to inside the window."""
        return TimeSpace(n_components, self.max_hop, 1, degree_cap)

    def __str__(self):
        return f"[{self.lo},{self.hi})"


class FockSpace:
    """Bit layout helper for an ``N``-component window."""

    def __init__(self, n_components: int, window: ModeWindow):
        self.n = n_components
        self.window = window

    def bit(self, alpha: int, j: int) -> int:
        if not 1 <= alpha <= self.n:
            raise ConfigurationError(f"component {alpha} outside 1..{self.n}")
        if j not in self.window:
            raise ConfigurationError(f"mode {j} outside window {self.window}")
        return (alpha - 1) * self.window.size + (j - self.window.lo)

    def vacuum_mask(self) -> int:
        m = 0
        for a in range(1, self.n + 1):
            for j in range(self.window.lo, 0):
                m |= 1 << self.bit(a, j)
        return m

    def charges(self, mask: int) -> tuple:
        w = self.window.size
        full = (1 << w) - 1
        return tuple(bin((mask >> ((a - 1) * w)) & full).count("1") + self.window.lo
                     for a in range(1, self.n + 1))

    def occupied(self, mask: int) -> dict:
        w = self.window
        return {a: sorted(j for j in range(w.lo, w.hi) if mask >> self.bit(a, j) & 1)
                for a in range(1, self.n + 1)}

    def mask_of(self, occupied: dict) -> int:
        m = 0
        for a, modes in occupied.items():
            for j in modes:
                m |= 1 << self.bit(a, j)
        return m


def _parity_below(mask: int, pos: int) -> int:
    return -1 if bin(mask & ((1 << pos) - 1)).count("1") & 1 else 1


class FockVector:
    """Finite combination of basis states with time-polynomial coefficients."""

    __slots__ = ("fock", "space", "terms")

    def __init__(self, fock: FockSpace, space: TimeSpace, terms: dict | None = None):
        self.fock = fock
        self.space = space
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def basis(cls, fock: FockSpace, space: TimeSpace, mask: int, coeff=1) -> "FockVector":
        return cls(fock, space, {mask: space.const(coeff)})

    def _same(self, other: "FockVector"):
        if other.fock.window != self.fock.window or other.fock.n != self.fock.n or other.space != self.space:
            raise ConfigurationError("Fock vectors live in different spaces")

    def __add__(self, other: "FockVector") -> "FockVector":
        self._same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return FockVector(self.fock, self.space, out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other * -1

    def __mul__(self, c) -> "FockVector":
        return FockVector(self.fock, self.space, {m: v * c for m, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.terms.keys() == other.terms.keys() and all(self.terms[m] == other.terms[m] for m in self.terms)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, mask: int) -> TimePolynomial:
        return self.terms.get(mask, self.space.zero)

    def filter_charges(self, allowed) -> "FockVector":
        allowed = set(map(tuple, allowed))
        return FockVector(self.fock, self.space,
                          {m: c for m, c in self.terms.items() if self.fock.charges(m) in allowed})

    def __repr__(self):
        parts = [f"{c.to_text()} |{self.fock.occupied(m)}>" for m, c in sorted(self.terms.items())]
        return "FockVector(" + " + ".join(parts) + ")"


def apply_fermion(kind: str, alpha: int, j: int, v: FockVector) -> FockVector:
    """Apply ``psi_j^(alpha)`` (fills the mode) or ``psi*_j^(alpha)`` (empties it)."""
    pos = v.fock.bit(alpha, j)
    bit = 1 << pos
    out = {}
    if kind == PSI:
        for m, c in v.terms.items():
            if not m & bit:
                out[m | bit] = c if _parity_below(m, pos) == 1 else -c
    elif kind == PSI_STAR:
        for m, c in v.terms.items():
            if m & bit:
                out[m ^ bit] = c if _parity_below(m, pos) == 1 else -c
    else:
        raise ValueError(f"unknown fermion kind {kind!r}")
    return FockVector(v.fock, v.space, out)


def vacuum(p, fock: FockSpace, space: TimeSpace) -> FockVector:
    """``|p> = Psi*_{p_N}^(N) ... Psi*_{p_1}^(1) |0>`` built operator by operator."""
    p = tuple(p)
    if len(p) != fock.n:
        raise ConfigurationError("charge vector length must equal N")
    w = fock.window
    for pa in p:
        if not w.lo <= pa <= w.hi:
            raise ConfigurationError(f"charge {pa} not representable in window {w}")
    v = FockVector.basis(fock, space, fock.vacuum_mask())
    for a, pa in enumerate(p, start=1):
        if pa > 0:
            for j in range(0, pa):  # psi_{p-1} ... psi_0, rightmost first
                v = apply_fermion(PSI, a, j, v)
        elif pa < 0:
            for j in range(-1, pa - 1, -1):  # psi*_p ... psi*_{-1}
                v = apply_fermion(PSI_STAR, a, j, v)
    return v


def dual_pairing(p, v: FockVector) -> TimePolynomial:
    """``<p| v`` with ``<p| = <0| Psi_{p_1}^(1) ... Psi_{p_N}^(N)``."""
    p = tuple(p)
    w = v.fock.window
    for pa in p:
        if not w.lo <= pa <= w.hi:
            raise ConfigurationError(f"charge {pa} not representable in window {w}")
    for a in range(len(p), 0, -1):
        pa = p[a - 1]
        if pa > 0:
            for j in range(pa - 1, -1, -1):  # psi*_0 ... psi*_{p-1}, rightmost first
                v = apply_fermion(PSI_STAR, a, j, v)
        elif pa < 0:
            for j in range(pa, 0):  # psi_{-1} ... psi_p
                v = apply_fermion(PSI, a, j, v)
    return v.coefficient(v.fock.vacuum_mask())


def _vacuum_basis(p, fock: FockSpace, space: TimeSpace) -> tuple[int, int]:
    """(mask, sign) of the basis state proportional to ``|p>``; the dual ``<p|`` reads ``sign * coeff``."""
    vac = vacuum(p, fock, space)
    (mask, c), = vac.terms.items()
    return mask, (1 if c.constant_term > 0 else -1)


def apply_current(alpha: int, k: int, v: FockVector) -> FockVector:
    """``J_k^(alpha) = sum_j psi_j psi*_{j+k}`` for ``k >= 1`` (terms leaving the window dropped)."""
    if k < 1:
        raise ValueError("only positive current modes are supported")
    w = v.fock.window
    out = FockVector(v.fock, v.space)
    for j in range(w.lo, w.hi - k):
        out = out + apply_fermion(PSI, alpha, j, apply_fermion(PSI_STAR, alpha, j + k, v))
    return out


def apply_J(v: FockVector) -> FockVector:
    """``J(t) v = sum_{alpha,k} t[alpha,k] J_k^(alpha) v`` over the orders present in ``v.space``."""
    fock, space = v.fock, v.space
    size = fock.window.size
    kmax = space.max_order
    cap = space.degree_cap
    shift = space.deg_shift
    vkeys = {(a, k): space.var_key(space.index(a, k)) for a in range(1, fock.n + 1) for k in range(1, kmax + 1)}
    acc: dict[int, dict] = {}
    for m, c in v.terms.items():
        terms = c.terms
        if cap is not None:
            terms = {key: x for key, x in terms.items() if ((key >> shift) & 255) < cap}
            if not terms:
                continue
        for a in range(1, fock.n + 1):
            base = (a - 1) * size
            for s in range(1, size):
                src = base + s
                if not m >> src & 1:
                    continue
                m1 = m ^ (1 << src)
                s1 = _parity_below(m, src)
                for d in range(max(0, s - kmax), s):
                    dst = base + d
                    if m1 >> dst & 1:
                        continue
                    sign = s1 * _parity_below(m1, dst)
                    m2 = m1 | (1 << dst)
                    vk = vkeys[(a, s - d)]
                    bucket = acc.setdefault(m2, {})
                    for key, x in terms.items():
                        nk = key + vk
                        y = bucket.get(nk)
                        bucket[nk] = (x if sign == 1 else -x) if y is None else (y + x if sign == 1 else y - x)
    out = {}
    for m2, terms in acc.items():
        terms = {k: x for k, x in terms.items() if x}
        if terms:
            out[m2] = TimePolynomial(space, terms)
    return FockVector(fock, space, out)


def apply_exp_J(v: FockVector, D: int | None = None) -> FockVector:
    """``sum_n J(t)^n / n! v`` for ``n <= D``; with ``D=None`` until the series terminates.

    On a finite window ``J(t)`` strictly lowers the energy of each state, so the
    untruncated series is a finite sum.
    """
    if D is not None and D < 0:
        raise ValueError("D must be non-negative")
    result = v
    term = v
    n = 0
    while D is None or n < D:
        n += 1
        term = apply_J(term) * Q(1, n)
        if term.is_zero():
            break
        result = result + term
    return result


@dataclass(frozen=True)
class Factor:
    """``exp(c * psi_i^(alpha) psi*_j^(beta))`` with ``(alpha, i) != (beta, j)``."""

    alpha: int
    i: int
    beta: int
    j: int
    c: object

    def to_line(self) -> str:
        c = Q(self.c)
        return f"factor {self.alpha} {self.i} {self.beta} {self.j} {c.numerator}/{c.denominator}"


@dataclass(frozen=True)
class CliffordSpec:
    """Ordered product ``g = f_1 f_2 ... f_n`` of single-bilinear exponentials."""

    factors: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(
            f if isinstance(f, Factor) else Factor(f[0], f[1], f[2], f[3], rational(f[4])) for f in self.factors))
        for f in self.factors:
            if (f.alpha, f.i) == (f.beta, f.j):
                raise ConfigurationError(f"same-mode factor {f} is not supported")

    def validate(self, n_components: int, window: ModeWindow):
        for f in self.factors:
            if not (1 <= f.alpha <= n_components and 1 <= f.beta <= n_components):
                raise ConfigurationError(f"factor {f} uses a component outside 1..{n_components}")
            if f.i not in window or f.j not in window:
                raise ConfigurationError(f"factor {f} uses a mode outside {window}")

    def modes(self):
        for f in self.factors:
            yield f.i
            yield f.j

    def to_text(self) -> str:
        return "".join(f.to_line() + "\n" for f in self.factors)

    @classmethod
    def from_text(cls, text: str) -> "CliffordSpec":
        factors = []
        for n, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.fullmatch(r"factor\s+(\d+)\s+(-?\d+)\s+(\d+)\s+(-?\d+)\s+(-?\d+(?:/\d+)?)", line)
            if not m:
                raise ConfigurationError(f"line {n}: cannot parse Clifford factor {line!r}")
            a, i, b, j, c = m.groups()
            factors.append(Factor(int(a), int(i), int(b), int(j), rational(c)))
        return cls(tuple(factors))


def apply_clifford(g: CliffordSpec, v: FockVector) -> FockVector:
    """Apply the factors right to left, each as ``1 + c psi psi*``."""
    g.validate(v.fock.n, v.fock.window)
    for f in reversed(g.factors):
        hop = apply_fermion(PSI, f.alpha, f.i, apply_fermion(PSI_STAR, f.beta, f.j, v))
        v = v + hop * f.c
    return v


def _unit(n, a):
    return tuple(1 if b == a else 0 for b in range(1, n + 1))


def _shifted(p, n, a, b):
    ea, eb = _unit(n, a), _unit(n, b)
    return tuple(x + y - z for x, y, z in zip(p, ea, eb))


def tau(p, alpha: int, beta: int, g: CliffordSpec, window: ModeWindow, D: int | None = None,
        space: TimeSpace | None = None) -> TimePolynomial:
    """``tau_{alpha beta}(p, t) = <p + e_alpha - e_beta| e^{J(t)} g |p>``."""
    p = tuple(p)
    n = len(p)
    space = space or window.exact_space(n)
    fock = FockSpace(n, window)
    q = _shifted(p, n, alpha, beta)
    v = apply_clifford(g, vacuum(p, fock, space)).filter_charges([q])
    v = apply_exp_J(v, D)
    return dual_pairing(q, v)


def required_window(p_lo: int, p_hi: int, g: CliffordSpec) -> ModeWindow:
    lo = min([p_lo - 1, -1] + [m for m in g.modes()])
    hi = max([p_hi + 1, 0] + [m + 1 for m in g.modes()])
    return ModeWindow(lo, hi)


def tau_table(p_lo: int, p_hi: int, g: CliffordSpec, n_components: int, window: ModeWindow,
              D: int | None = None, space: TimeSpace | None = None) -> TauTable:
    """Diagonal and off-diagonal taus at ``p_alpha = p`` for every ``p`` in ``[p_lo, p_hi]``."""
    need = required_window(p_lo, p_hi, g)
    if window.lo > need.lo or window.hi < need.hi:
        raise ConfigurationError(
            f"mode window {window} too small for p in [{p_lo},{p_hi}] and g; need at least {need}")
    N = n_components
    g.validate(N, window)
    space = space or window.exact_space(N)
    fock = FockSpace(N, window)
    taus = {}
    for p in range(p_lo, p_hi + 1):
        pv = (p,) * N
        targets = {(a, b): _shifted(pv, N, a, b) for a in range(1, N + 1) for b in range(1, N + 1)}
        v = apply_clifford(g, vacuum(pv, fock, space)).filter_charges(targets.values())
        v = apply_exp_J(v, D)
        for (a, b), q in targets.items():
            mask, sign = _vacuum_basis(q, fock, space)
            c = v.coefficient(mask)
            taus[(p, a, b)] = c if sign == 1 else -c
    prov = {"clifford": g.to_text(), "D": D, "window": [window.lo, window.hi]}
    return TauTable(N, p_lo, p_hi, space, taus, prov)


def tables_agree(t1: TauTable, t2: TauTable, D: int | None = None) -> bool:
    """Coefficient-exact comparison of two tau tables (through degree ``D`` when given)."""
    if (t1.n_components, t1.p_lo, t1.p_hi) != (t2.n_components, t2.p_lo, t2.p_hi):
        return False
    big = t1.space if t1.space.max_order >= t2.space.max_order else t2.space
    big = big.with_cap(D)
    for key in t1.taus:
        if t1.taus[key].restrict(big) != t2.taus[key].restrict(big):
            return False
    return True


def window_stability_check(g: CliffordSpec, D: int | None, w1: ModeWindow, w2: ModeWindow,
                           n_components: int, p_lo: int, p_hi: int) -> bool:
    """True iff enlarging the mode window from ``w1`` to ``w2`` leaves every tau unchanged."""
    if not (w2.lo <= w1.lo and w1.hi <= w2.hi):
        raise ConfigurationError("w1 must be contained in w2")
    a = tau_table(p_lo, p_hi, g, n_components, w1, D)
    b = tau_table(p_lo, p_hi, g, n_components, w2, D)
    return tables_agree(a, b, D)
