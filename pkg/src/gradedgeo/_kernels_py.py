"""Pure-Python inner loops for monomial and series arithmetic.

``_ckernels.pyx`` is a typed copy of this file. Both must stay semantically
identical; tests/test_kernels.py runs the same cases against each backend.

Conventions shared by both backends
-----------------------------------
exps        tuple of formal exponents, one slot per formal variable
pair_lower  pair_lower[i] is a bitmask of j < i with <deg_i, deg_j> odd
odd         tuple of 0/1 flags, 1 for nilpotent (odd) variables
"""


def _oddmask(e):
    m = 0
    for j in range(len(e)):
        if e[j] & 1:
            m |= 1 << j
    return m


def _popparity(x):
    return bin(x).count("1") & 1


def mono_mul(a, b, pair_lower, odd, order):
    """Multiply monomial ``a`` by ``b`` (a on the left).

    Returns ``(sign, exps)``; sign is 0 (and exps None) when an odd variable
    repeats or the formal degree exceeds ``order``.
    """
    total = 0
    k = len(a)
    for i in range(k):
        s = a[i] + b[i]
        if s > 1 and odd[i]:
            return 0, None
        total += s
    if total > order:
        return 0, None
    mb = _oddmask(b)
    par = 0
    for i in range(k):
        if a[i] & 1:
            par ^= _popparity(pair_lower[i] & mb)
    return (-1 if par else 1), tuple(a[i] + b[i] for i in range(k))


def mul_terms(ta, tb, pair_lower, odd, order):
    """Product of two term lists ``[(exps, coeff), ...]`` as an unpruned dict."""
    out = {}
    if not ta or not tb:
        return out
    k = len(ta[0][0])
    pre_b = []
    for eb, cb in tb:
        pre_b.append((eb, cb, sum(eb), _oddmask(eb)))
    for ea, ca in ta:
        da = sum(ea)
        if da > order:
            continue
        for eb, cb, db, mb in pre_b:
            if da + db > order:
                continue
            clash = False
            par = 0
            for i in range(k):
                ai = ea[i]
                if ai:
                    if odd[i] and eb[i]:
                        clash = True
                        break
                    if ai & 1:
                        par ^= _popparity(pair_lower[i] & mb)
            if clash:
                continue
            key = tuple([ea[i] + eb[i] for i in range(k)])
            val = ca * cb
            if par:
                val = -val
            prev = out.get(key)
            out[key] = val if prev is None else prev + val
    return out


def ldiff_terms(terms, idx, pair_lower):
    """Left derivative with respect to formal variable ``idx`` (unpruned dict)."""
    out = {}
    for e, c in terms:
        p = e[idx]
        if not p:
            continue
        par = 0
        for j in range(idx):
            if e[j] & 1 and (pair_lower[idx] >> j) & 1:
                par ^= 1
        key = tuple(e[j] - 1 if j == idx else e[j] for j in range(len(e)))
        val = c * p
        if par:
            val = -val
        prev = out.get(key)
        out[key] = val if prev is None else prev + val
    return out


def poly_mul(pa, pb):
    """Product of sparse polynomials ``{exps: coefficient}``, zeros pruned."""
    out = {}
    for ea, ca in pa.items():
        for eb, cb in pb.items():
            key = tuple([x + y for x, y in zip(ea, eb)])
            v = ca * cb
            prev = out.get(key)
            out[key] = v if prev is None else prev + v
    return {k: v for k, v in out.items() if v}
