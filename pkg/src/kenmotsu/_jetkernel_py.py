"""Pure numpy fallback for the truncated-Taylor kernels in ``_jetkernel.pyx``.

Both functions require the pair tables to be sorted by output monomial, which
``JetAlgebra`` guarantees; the fold is then a single ``np.add.reduceat``.
"""
import numpy as np


def _fold(terms, ic, m_out):
    starts = np.flatnonzero(np.r_[True, ic[1:] != ic[:-1]])
    out = np.zeros((m_out, terms.shape[1]))
    out[ic[starts]] = np.add.reduceat(terms, starts, axis=0)
    return out


def mul(a, b, ia, ib, ic, m_out):
    return _fold(a[ia] * b[ib], ic, m_out)


def compose(a, taylor, ia, ib, ic):
    h = np.array(a, dtype=float)
    h[0] = 0.0
    m = h.shape[0]
    acc = np.zeros_like(h)
    acc[0] = taylor[-1]
    for k in range(taylor.shape[0] - 2, -1, -1):
        acc = mul(acc, h, ia, ib, ic, m)
        acc[0] += taylor[k]
    return acc
