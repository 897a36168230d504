"""Tensor values at a point, metric inversion and pseudo-orthonormal frames."""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

UP, DOWN = "u", "l"

FRAME_TOL = 1e-8
DEGENERACY_TOL = 1e-12


class DegenerateMetric(ValueError):
    pass


class InvalidSlots(ValueError):
    pass


class FrameFailure(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class TensorValue:
    """Dense components with one variance marker (``'u'``/``'l'``) per slot."""

    components: np.ndarray
    variance: tuple

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        variance = tuple(self.variance)
        if any(v not in (UP, DOWN) for v in variance):
            raise ValueError(f"variance markers must be 'u' or 'l': {variance}")
        if comps.ndim != len(variance):
            raise ValueError(f"{comps.ndim}-index array for {len(variance)} slots")
        if comps.ndim and len(set(comps.shape)) != 1:
            raise ValueError(f"components must be dim^rank, got shape {comps.shape}")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "variance", variance)

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def dim(self) -> int:
        return self.components.shape[0] if self.rank else 0

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)

    def __eq__(self, other):
        return (
            isinstance(other, TensorValue)
            and self.variance == other.variance
            and np.array_equal(self.components, other.components)
        )

    def __add__(self, other):
        _same_type(self, other)
        return TensorValue(self.components + other.components, self.variance)

    def __sub__(self, other):
        _same_type(self, other)
        return TensorValue(self.components - other.components, self.variance)

    def __mul__(self, s):
        return TensorValue(self.components * float(s), self.variance)

    __rmul__ = __mul__

    def lower(self, slot: int, metric: "MetricAtPoint") -> "TensorValue":
        if self.variance[slot] != UP:
            raise InvalidSlots(f"slot {slot} is already lower")
        return self._apply(slot, metric.g, DOWN)

    def raise_(self, slot: int, metric: "MetricAtPoint") -> "TensorValue":
        if self.variance[slot] != DOWN:
            raise InvalidSlots(f"slot {slot} is already upper")
        return self._apply(slot, metric.g_inv, UP)

    def _apply(self, slot, mat, new):
        comps = np.moveaxis(np.tensordot(mat, self.components, axes=([1], [slot])), 0, slot)
        variance = list(self.variance)
        variance[slot] = new
        return TensorValue(comps, tuple(variance))


def _same_type(a, b):
    if a.variance != b.variance or a.components.shape != b.components.shape:
        raise ValueError("tensor types differ")


@dataclass(frozen=True, eq=False)
class MetricAtPoint:
    g: np.ndarray
    g_inv: np.ndarray
    det: float
    signature: tuple  # (positive, negative)

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def inner(self, x, y) -> float:
        return float(np.asarray(x) @ self.g @ np.asarray(y))

    def scale(self) -> float:
        return float(np.max(np.abs(self.g)))


def invert_metric(g, sym_tol: float = 1e-12) -> MetricAtPoint:
    """Invert a symmetric (0,2) metric and count its signature."""
    g = np.asarray(getattr(g, "components", g), dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("metric must be a square matrix")
    scale = float(np.max(np.abs(g))) if g.size else 0.0
    if scale == 0.0:
        raise DegenerateMetric("metric is identically zero")
    if np.max(np.abs(g - g.T)) > sym_tol * scale:
        raise ValueError("metric is not symmetric")
    g = 0.5 * (g + g.T)
    det = float(np.linalg.det(g))
    d = g.shape[0]
    if abs(det) < DEGENERACY_TOL * scale**d:
        raise DegenerateMetric(f"|det g| = {abs(det):.3e} is below tolerance")
    g_inv = np.linalg.solve(g, np.eye(d))
    g_inv = 0.5 * (g_inv + g_inv.T)
    eig = np.linalg.eigvalsh(g)
    signature = (int(np.sum(eig > 0)), int(np.sum(eig < 0)))
    return MetricAtPoint(g, g_inv, det, signature)


def contract(t: TensorValue, slot_a: int, slot_b: int, metric: Optional[MetricAtPoint] = None) -> TensorValue:
    """Trace over two slots, inserting the metric when both have equal variance."""
    if t.rank < 2:
        raise InvalidSlots("contraction needs a tensor of rank >= 2")
    if slot_a == slot_b or not (0 <= slot_a < t.rank and 0 <= slot_b < t.rank):
        raise InvalidSlots(f"invalid slot pair ({slot_a}, {slot_b})")
    va, vb = t.variance[slot_a], t.variance[slot_b]
    comps = t.components
    if va == vb:
        if metric is None:
            raise InvalidSlots("contracting slots of equal variance needs a metric")
        mat = metric.g_inv if va == DOWN else metric.g
        letters = string.ascii_lowercase[: t.rank]
        la, lb = letters[slot_a], letters[slot_b]
        comps = np.einsum(f"{letters},{la}{lb}->{letters.replace(la, '').replace(lb, '')}", comps, mat)
    else:
        comps = np.trace(comps, axis1=slot_a, axis2=slot_b)
    variance = tuple(v for k, v in enumerate(t.variance) if k not in (slot_a, slot_b))
    return TensorValue(comps, variance)


@dataclass(frozen=True, eq=False)
class Frame:
    """Columns of ``vectors`` are the frame vectors; ``signs[a] = g(E_a, E_a)``."""

    vectors: np.ndarray
    signs: tuple

    @property
    def dual(self) -> np.ndarray:
        """Rows are the dual covectors: ``dual @ vectors = I``."""
        return np.linalg.inv(self.vectors)


def build_frame(metric: MetricAtPoint, hint=None, tol: float = FRAME_TOL) -> Frame:
    """Indefinite Gram-Schmidt over the coordinate basis (hint first).

    Candidates that are light-like after projection are skipped; the pool
    also holds pairwise sums and differences of basis vectors, which always
    contain a non-null direction of any nondegenerate complement.
    """
    g = metric.g
    d = metric.dim
    scale = metric.scale()
    eye = np.eye(d)
    pool = []
    if hint is not None:
        pool.append(np.asarray(hint, dtype=float))
    pool.extend(eye)
    for i, j in itertools.combinations(range(d), 2):
        pool.append(eye[i] + eye[j])
        pool.append(eye[i] - eye[j])

    vectors, signs = [], []
    for cand in pool:
        if len(vectors) == d:
            break
        v = cand.copy()
        for e, s in zip(vectors, signs):
            v = v - s * (v @ g @ e) * e
        # second pass keeps the projection accurate
        for e, s in zip(vectors, signs):
            v = v - s * (v @ g @ e) * e
        norm2 = float(v @ g @ v)
        ref = float(v @ v) * scale
        if ref == 0.0 or abs(norm2) < tol * ref:
            continue
        vectors.append(v / np.sqrt(abs(norm2)))
        signs.append(1 if norm2 > 0 else -1)
    if len(vectors) < d:
        raise FrameFailure("no non-light-like pivot left in the candidate pool")
    return Frame(np.column_stack(vectors), tuple(signs))


def frame_components(components, variance: Sequence[str], frame: Frame) -> np.ndarray:
    """Express a coordinate tensor in the frame: lower slots eat E, upper slots E^-1."""
    out = np.asarray(components, dtype=float)
    dual = frame.dual
    for slot, v in enumerate(variance):
        mat = frame.vectors if v == DOWN else dual.T
        out = np.moveaxis(np.tensordot(out, mat, axes=([slot], [0])), -1, slot)
    return out
