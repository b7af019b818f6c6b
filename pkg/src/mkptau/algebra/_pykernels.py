"""Pure-Python polynomial kernels.

Monomials are packed into a single integer: variable ``i`` occupies bits
``[EXP_BITS*i, EXP_BITS*(i+1))`` and each alphabet copy ``c`` keeps its total
degree in an 8-bit field starting at ``deg_shift + DEG_BITS*c``.  Multiplying
monomials is then integer addition.
"""
from bisect import bisect_right

EXP_BITS = 6
DEG_BITS = 8
DEG_MASK = (1 << DEG_BITS) - 1
MAX_EXACT_DEGREE = (1 << EXP_BITS) - 1


def _deg(key, shift):
    return (key >> shift) & DEG_MASK


def add_terms(a, b, sign=1):
    out = dict(a)
    get = out.get
    if sign == 1:
        for k, c in b.items():
            v = get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
    else:
        for k, c in b.items():
            v = get(k)
            if v is None:
                out[k] = -c
            else:
                v = v - c
                if v:
                    out[k] = v
                else:
                    del out[k]
    return out


def mul_terms(a, b, deg_shift, ncopies, cap):
    """Product of two term dicts, dropping monomials above ``cap`` in any copy."""
    if not a or not b:
        return {}
    out = {}
    get = out.get
    if cap is None:
        for c in range(ncopies):
            sh = deg_shift + DEG_BITS * c
            if max(_deg(k, sh) for k in a) + max(_deg(k, sh) for k in b) > MAX_EXACT_DEGREE:
                raise OverflowError("untruncated product exceeds the packed exponent range")
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = ka + kb
                v = get(k)
                out[k] = ca * cb if v is None else v + ca * cb
    else:
        bl = sorted(b.items(), key=lambda kv: _deg(kv[0], deg_shift))
        degs = [_deg(k, deg_shift) for k, _ in bl]
        prefixes = [bl[: bisect_right(degs, r)] for r in range(cap + 1)]
        sh1 = deg_shift + DEG_BITS
        for ka, ca in a.items():
            room = cap - _deg(ka, deg_shift)
            if room < 0:
                continue
            if ncopies == 1:
                for kb, cb in prefixes[room]:
                    k = ka + kb
                    v = get(k)
                    out[k] = ca * cb if v is None else v + ca * cb
            else:
                for kb, cb in prefixes[room]:
                    k = ka + kb
                    if ((k >> sh1) & DEG_MASK) > cap:
                        continue
                    v = get(k)
                    out[k] = ca * cb if v is None else v + ca * cb
    return {k: v for k, v in out.items() if v}


def scale_terms(a, c):
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}

