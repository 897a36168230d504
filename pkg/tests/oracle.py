"""Independent reference computations used by the tests.

Nothing here goes through the jet machinery: the symbolic route uses sympy
derivatives, the numeric route central finite differences of metric values.
"""

import numpy as np


def sympy_metric(spec):
    import sympy as sp

    syms = sp.symbols(spec.coords)
    local = {c: s for c, s in zip(spec.coords, syms)}
    subs = dict(spec.params)
    subs["eps"] = spec.epsilon
    g = sp.Matrix(
        [[sp.sympify(str(e), locals=local, convert_xor=True).subs(subs) for e in row] for row in spec.metric]
    )
    return syms, g


def sympy_curvature(spec, point):
    """Gamma[k,i,j], R[l,k,i,j] (R(d_i,d_j)d_k = R^l_kij d_l), Ric[j,k], r at ``point``.

    Metric derivatives come from sympy; the assembly is plain numpy.
    """
    import sympy as sp

    x, g = sympy_metric(spec)
    n = len(x)
    at = dict(zip(x, point))
    g0 = np.array(g.subs(at), dtype=float)
    dg = np.array([[[float(sp.diff(g[i, j], x[m]).subs(at)) for j in range(n)] for i in range(n)] for m in range(n)])
    ddg = np.array(
        [[[[float(sp.diff(g[i, j], x[m], x[q]).subs(at)) for j in range(n)] for i in range(n)] for m in range(n)] for q in range(n)]
    )
    gi = np.linalg.inv(g0)
    # S[i,j,l] = d_i g_jl + d_j g_il - d_l g_ij and its derivative along q
    S = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)
    dS = ddg + ddg.transpose(0, 2, 1, 3) - ddg.transpose(0, 2, 3, 1)
    G = 0.5 * np.einsum("kl,ijl->kij", gi, S)
    dgi = -np.einsum("ka,qab,bl->qkl", gi, dg, gi)
    dG = 0.5 * (np.einsum("qkl,ijl->qkij", dgi, S) + np.einsum("kl,qijl->qkij", gi, dS))
    # R^l_kij = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    R = (
        np.einsum("iljk->lkij", dG)
        - np.einsum("jlik->lkij", dG)
        + np.einsum("lim,mjk->lkij", G, G)
        - np.einsum("ljm,mik->lkij", G, G)
    )
    ric = np.einsum("ikij->jk", R)
    return G, R, ric, float(np.einsum("jk,jk->", gi, ric))


def fd_christoffel(spec, point, h=1e-4):
    """Christoffel symbols from central differences of the metric values."""
    p = np.asarray(point, dtype=float)
    n = len(p)
    dg = np.empty((n, n, n))
    for m in range(n):
        e = np.zeros(n)
        e[m] = h
        dg[m] = (spec.metric_at(tuple(p + e)) - spec.metric_at(tuple(p - e))) / (2 * h)
    ginv = np.linalg.inv(spec.metric_at(tuple(p)))
    s = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)
    return 0.5 * np.einsum("kl,ijl->kij", ginv, s)


def random_metric_entries(rng, dim, signs=None, coords=None):
    """Symmetric matrix of expression strings, nondegenerate near the origin.

    The diagonal dominates with the given signs; off-diagonal terms are small
    smooth functions so every derivative up to third order is generic.
    """
    coords = coords or [f"u{i}" for i in range(dim)]
    signs = signs if signs is not None else [1.0] * dim
    g = [["0"] * dim for _ in range(dim)]
    for i in range(dim):
        a, b, c = rng.uniform(0.2, 0.6, 3)
        u, v = coords[i], coords[(i + 1) % dim]
        base = f"({1.5 + rng.uniform(0, 0.5):.6f} + {a:.6f}*sin({b:.6f}*{u} + {c:.6f}*{v}))"
        g[i][i] = base if signs[i] > 0 else f"-{base}"
        for j in range(i + 1, dim):
            a, b = rng.uniform(-0.15, 0.15, 2)
            w = coords[(i + j) % dim]
            g[i][j] = g[j][i] = f"{a:.6f}*exp({b:.6f}*{coords[i]}*{coords[j]} + 0.2*{w})"
    return coords, g
