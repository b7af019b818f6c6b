# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the packed-monomial polynomial kernels.

Products accumulate in place through the GMP rational API, so each term costs
one ``mpq_mul`` and one ``mpq_add`` instead of two new Python objects.
"""
from bisect import bisect_right

from gmpy2 cimport GMPy_MPQ_New, import_gmpy2, mpq, mpq_t

cdef extern from "gmp.h":
    void mpq_init(mpq_t)
    void mpq_clear(mpq_t)
    void mpq_mul(mpq_t, const mpq_t, const mpq_t)
    void mpq_add(mpq_t, const mpq_t, const mpq_t)
    int mpq_sgn(const mpq_t)

import gmpy2

import_gmpy2()

cdef long DEG_BITS = 8
cdef long DEG_MASK = 255
cdef long MAX_EXACT_DEGREE = 63


cdef inline long _deg(object key, long shift):
    return (key >> shift) & DEG_MASK


def add_terms(dict a, dict b, int sign=1):
    cdef dict out = dict(a)
    cdef object k, c, v
    for k, c in b.items():
        v = out.get(k)
        if v is None:
            out[k] = c if sign == 1 else -c
        else:
            v = v + c if sign == 1 else v - c
            if v:
                out[k] = v
            else:
                del out[k]
    return out


cdef list _as_mpq(dict d):
    return [(k, c if type(c) is mpq else gmpy2.mpq(c)) for k, c in d.items()]


cdef inline void _acc(dict out, object k, mpq ca, mpq cb, mpq_t tmp):
    cdef mpq v = out.get(k)
    if v is None:
        v = GMPy_MPQ_New(NULL)
        mpq_mul(v.q, ca.q, cb.q)
        out[k] = v
    else:
        # v was created here and is not shared yet
        mpq_mul(tmp, ca.q, cb.q)
        mpq_add(v.q, v.q, tmp)


def mul_terms(dict a, dict b, long deg_shift, int ncopies, cap):
    if not a or not b:
        return {}
    cdef dict out = {}
    cdef object ka, kb, k
    cdef mpq ca, cb
    cdef long room, icap, sh1, sh, c
    cdef list al, bl, degs, prefixes, pref
    cdef mpq_t tmp
    al = _as_mpq(a)
    mpq_init(tmp)
    try:
        if cap is None:
            for c in range(ncopies):
                sh = deg_shift + DEG_BITS * c
                if max([_deg(k, sh) for k in a]) + max([_deg(k, sh) for k in b]) > MAX_EXACT_DEGREE:
                    raise OverflowError("untruncated product exceeds the packed exponent range")
            bl = _as_mpq(b)
            for ka, ca in al:
                for kb, cb in bl:
                    _acc(out, ka + kb, ca, cb, tmp)
        else:
            icap = cap
            bl = sorted(_as_mpq(b), key=lambda kv: (kv[0] >> deg_shift) & DEG_MASK)
            degs = [_deg(kv[0], deg_shift) for kv in bl]
            prefixes = [bl[: bisect_right(degs, r)] for r in range(icap + 1)]
            sh1 = deg_shift + DEG_BITS
            for ka, ca in al:
                room = icap - _deg(ka, deg_shift)
                if room < 0:
                    continue
                pref = prefixes[room]
                if ncopies == 1:
                    for kb, cb in pref:
                        _acc(out, ka + kb, ca, cb, tmp)
                else:
                    for kb, cb in pref:
                        k = ka + kb
                        if _deg(k, sh1) > icap:
                            continue
                        _acc(out, k, ca, cb, tmp)
    finally:
        mpq_clear(tmp)
    return {k: v for k, v in out.items() if mpq_sgn((<mpq>v).q) != 0}


def scale_terms(dict a, c):
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}
