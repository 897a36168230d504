"""Manifold specifications: chart, metric expressions and optional blocks."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from kenmotsu.expr import Expr, eval_jet, parse
from kenmotsu.jet import Jet

EPS_NAME = "eps"


class SpecError(ValueError):
    pass


def _tuplify(x):
    if isinstance(x, (list, tuple)):
        return tuple(_tuplify(v) for v in x)
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return repr(float(x))
    return x


@dataclass(frozen=True)
class StructureBlock:
    """Almost contact data as expression text.

    ``phi[i][j]`` is the i-th component of ``phi(d/dx_j)``.
    """

    phi: tuple
    xi: tuple
    eta: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "phi", _tuplify(self.phi))
        object.__setattr__(self, "xi", _tuplify(self.xi))
        if self.eta is not None:
            object.__setattr__(self, "eta", _tuplify(self.eta))


@dataclass(frozen=True)
class SolitonBlock:
    V: tuple
    lam: str = "0"

    def __post_init__(self):
        object.__setattr__(self, "V", _tuplify(self.V))
        object.__setattr__(self, "lam", _tuplify(self.lam))


@dataclass(frozen=True)
class Sampling:
    points: tuple = ()
    lo: Optional[tuple] = None
    hi: Optional[tuple] = None
    count: int = 0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(tuple(float(x) for x in p) for p in self.points))
        if self.lo is not None:
            object.__setattr__(self, "lo", tuple(float(x) for x in self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", tuple(float(x) for x in self.hi))

    def generate(self, dim: int, seed: Optional[int] = None, count: Optional[int] = None) -> list:
        pts = [p for p in self.points]
        n = self.count if count is None else count
        if n and self.lo is not None:
            rng = np.random.default_rng(self.seed if seed is None else seed)
            lo, hi = np.array(self.lo), np.array(self.hi)
            for row in rng.uniform(lo, hi, size=(n, dim)):
                pts.append(tuple(float(x) for x in row))
        for p in pts:
            if len(p) != dim:
                raise SpecError(f"sample point {p} does not have {dim} coordinates")
        return pts


@dataclass(frozen=True)
class ManifoldSpec:
    name: str
    coords: tuple
    epsilon: float
    metric: tuple
    structure: Optional[StructureBlock] = None
    soliton: Optional[SolitonBlock] = None
    params: tuple = ()  # (name, value) pairs; eps is implicit
    sampling: Sampling = field(default_factory=Sampling)
    tolerances: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "metric", _tuplify(self.metric))
        if isinstance(self.params, Mapping):
            object.__setattr__(self, "params", tuple(sorted(self.params.items())))
        if isinstance(self.tolerances, Mapping):
            object.__setattr__(self, "tolerances", tuple(sorted(self.tolerances.items())))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        self.validate()

    # ------------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def n(self) -> int:
        return (self.dim - 1) // 2

    @property
    def param_names(self) -> tuple:
        return (EPS_NAME,) + tuple(k for k, _ in self.params if k != EPS_NAME)

    @property
    def param_values(self) -> dict:
        vals = {k: float(v) for k, v in self.params}
        vals[EPS_NAME] = self.epsilon
        return vals

    def tolerance(self, key: str, default: float) -> float:
        return float(dict(self.tolerances).get(key, dict(self.tolerances).get("default", default)))

    def validate(self):
        d = self.dim
        if d < 3 or d % 2 == 0:
            raise SpecError(f"chart dimension must be 2n+1 with n >= 1, got {d}")
        if len(set(self.coords)) != d:
            raise SpecError("coordinate names must be distinct")
        if self.epsilon not in (1.0, -1.0):
            raise SpecError(f"epsilon must be +1 or -1, got {self.epsilon}")
        if len(self.metric) != d or any(len(row) != d for row in self.metric):
            raise SpecError(f"metric must be a {d}x{d} matrix")
        for i in range(d):
            self.expr(self.metric[i][i])
            for j in range(i):
                a, b = self.expr(self.metric[i][j]), self.expr(self.metric[j][i])
                if a.root != b.root:
                    raise SpecError(f"metric is not symmetric in entries ({i},{j}) and ({j},{i})")
        if self.structure is not None:
            s = self.structure
            if len(s.phi) != d or any(len(r) != d for r in s.phi):
                raise SpecError(f"phi must be a {d}x{d} matrix")
            if len(s.xi) != d:
                raise SpecError(f"xi must have {d} components")
            if s.eta is not None and len(s.eta) != d:
                raise SpecError(f"eta must have {d} components")
            for src in _flatten((s.phi, s.xi, s.eta or ())):
                self.expr(src)
        if self.soliton is not None:
            if len(self.soliton.V) != d:
                raise SpecError(f"soliton V must have {d} components")
            for src in self.soliton.V:
                self.expr(src)
            # lambda is a constant: it may use parameters but no coordinates
            parse(self.soliton.lam, (), self.param_names)

    def expr(self, source) -> Expr:
        return parse(source, self.coords, self.param_names)

    # ------------------------------------------------------------------

    def field_jet(self, nested, point, order: int) -> Jet:
        """Jet of a nested list of expressions at ``point``."""
        vals = self.param_values
        if isinstance(nested, tuple):
            return Jet.stack([self.field_jet(x, point, order) for x in nested])
        return eval_jet(self.expr(nested), point, vals, order)

    def metric_jet(self, point, order: int) -> Jet:
        return self.field_jet(self.metric, point, order)

    def metric_at(self, point) -> np.ndarray:
        return self.metric_jet(point, 0).value

    def lam_value(self) -> float:
        if self.soliton is None:
            raise SpecError("no soliton block")
        return eval_jet(self.expr(self.soliton.lam), (0.0,) * self.dim, self.param_values, 0).value

    def sample_points(self, seed: Optional[int] = None, count: Optional[int] = None) -> list:
        return self.sampling.generate(self.dim, seed=seed, count=count)

    # variants ---------------------------------------------------------

    def with_epsilon(self, epsilon: float) -> "ManifoldSpec":
        return dataclasses.replace(self, epsilon=float(epsilon))

    def with_params(self, **values: float) -> "ManifoldSpec":
        merged = dict(self.params)
        for k, v in values.items():
            if k == EPS_NAME:
                raise SpecError("set epsilon with with_epsilon")
            merged[k] = float(v)
        return dataclasses.replace(self, params=tuple(sorted(merged.items())))

    def with_structure(self, structure: Optional[StructureBlock]) -> "ManifoldSpec":
        return dataclasses.replace(self, structure=structure)

    def with_soliton(self, soliton: Optional[SolitonBlock]) -> "ManifoldSpec":
        return dataclasses.replace(self, soliton=soliton)

    def with_metric(self, metric: Sequence) -> "ManifoldSpec":
        return dataclasses.replace(self, metric=_tuplify(metric))

    def with_sampling(self, sampling: Sampling) -> "ManifoldSpec":
        return dataclasses.replace(self, sampling=sampling)


def _flatten(x):
    if isinstance(x, tuple):
        for v in x:
            yield from _flatten(v)
    else:
        yield x
