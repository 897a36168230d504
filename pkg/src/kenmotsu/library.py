"""Named builtin manifolds.

Each entry documents the verdicts it is expected to reach under the
default tolerances; the test suite holds them to it.
"""

from __future__ import annotations

from typing import Callable, Dict

from kenmotsu.manifold import ManifoldSpec, Sampling, SolitonBlock, StructureBlock


class UnknownBuiltin(KeyError):
    def __str__(self):
        return f"unknown builtin manifold {self.args[0]!r} (known: {', '.join(names())})"


# x, y free, |z| kept small so e^{2z} stays well conditioned
_BOX3 = Sampling(
    points=((0.0, 0.0, 0.0), (0.3, -0.2, 0.1), (1.0, 1.0, -1.0)),
    lo=(-2.0, -2.0, -1.5),
    hi=(2.0, 2.0, 1.5),
    count=5,
    seed=0,
)

_PHI3 = (("0", "-1", "0"), ("1", "0", "0"), ("0", "0", "0"))
_XI3 = ("0", "0", "1")


def _kenmotsu3(epsilon: float = 1.0) -> ManifoldSpec:
    """g = diag(e^{2z}, e^{2z}, eps) with phi rotating the (x, y) plane.

    Kenmotsu, Einstein with Ric = -2 eps g, constant curvature -eps and a
    Ricci soliton for the Killing field V = alpha d/dy with lambda = 2 eps.
    """
    return ManifoldSpec(
        name="kenmotsu3",
        coords=("x", "y", "z"),
        epsilon=epsilon,
        metric=(("exp(2*z)", "0", "0"), ("0", "exp(2*z)", "0"), ("0", "0", "eps")),
        structure=StructureBlock(_PHI3, _XI3),
        soliton=SolitonBlock(("0", "alpha", "0"), "2*eps"),
        params={"alpha": 1.5},
        sampling=_BOX3,
    )


def _hyperbolic3(epsilon: float = 1.0) -> ManifoldSpec:
    """kenmotsu3 with eps = +1: the upper half-space model of curvature -1."""
    if epsilon != 1.0:
        raise ValueError("hyperbolic3 has eps pinned to +1")
    spec = _kenmotsu3(1.0)
    return ManifoldSpec(
        name="hyperbolic3",
        coords=spec.coords,
        epsilon=1.0,
        metric=spec.metric,
        structure=spec.structure,
        soliton=spec.soliton,
        params=spec.params,
        sampling=spec.sampling,
    )


def _kenmotsu5(epsilon: float = 1.0) -> ManifoldSpec:
    """g = diag(e^{2z} I_4, eps), phi rotating (x1, y1) and (x2, y2).

    Ric = -4 eps g, r = -20 eps, constant curvature -eps, conformally flat.
    """
    w = "exp(2*z)"
    metric = tuple(
        tuple((w if i < 4 else "eps") if i == j else "0" for j in range(5)) for i in range(5)
    )
    phi = [["0"] * 5 for _ in range(5)]
    for a in (0, 2):
        phi[a + 1][a] = "1"
        phi[a][a + 1] = "-1"
    return ManifoldSpec(
        name="kenmotsu5",
        coords=("x1", "y1", "x2", "y2", "z"),
        epsilon=epsilon,
        metric=metric,
        structure=StructureBlock(phi, ("0", "0", "0", "0", "1")),
        soliton=SolitonBlock(("0", "0", "0", "0", "0"), "4*eps"),
        sampling=Sampling(
            points=((0.0,) * 5, (0.3, -0.2, 0.5, 0.1, 0.2)),
            lo=(-2.0,) * 4 + (-1.5,),
            hi=(2.0,) * 4 + (1.5,),
            count=4,
            seed=0,
        ),
    )


def _warped3(epsilon: float = 1.0) -> ManifoldSpec:
    """g = diag(w, w, eps), w = exp(2z + 0.6 sin x + 0.4 y^2).

    Still Kenmotsu (the (x, y) factor is a conformally flat Kaehler surface
    warped by e^{2z}) but neither Einstein nor of constant curvature.
    """
    w = "exp(2*z + 0.6*sin(x) + 0.4*y^2)"
    return ManifoldSpec(
        name="warped3",
        coords=("x", "y", "z"),
        epsilon=epsilon,
        metric=((w, "0", "0"), ("0", w, "0"), ("0", "0", "eps")),
        structure=StructureBlock(_PHI3, _XI3),
        sampling=_BOX3,
    )


def _perturbed3(epsilon: float = 1.0) -> ManifoldSpec:
    """diag(e^{2z}, e^{3z}, eps) with the kenmotsu3 structure: not Kenmotsu."""
    return ManifoldSpec(
        name="perturbed3",
        coords=("x", "y", "z"),
        epsilon=epsilon,
        metric=(("exp(2*z)", "0", "0"), ("0", "exp(3*z)", "0"), ("0", "0", "eps")),
        structure=StructureBlock(_PHI3, _XI3),
        sampling=_BOX3,
    )


def _flat3(epsilon: float = 1.0) -> ManifoldSpec:
    """Euclidean R^3, no structure block."""
    return ManifoldSpec(
        name="flat3",
        coords=("x", "y", "z"),
        epsilon=epsilon,
        metric=(("1", "0", "0"), ("0", "1", "0"), ("0", "0", "1")),
        sampling=_BOX3,
    )


_REGISTRY: Dict[str, Callable[..., ManifoldSpec]] = {
    "kenmotsu3": _kenmotsu3,
    "kenmotsu5": _kenmotsu5,
    "flat3": _flat3,
    "perturbed3": _perturbed3,
    "hyperbolic3": _hyperbolic3,
    "warped3": _warped3,
}

PINNED_EPSILON = frozenset({"hyperbolic3"})


def names() -> tuple:
    return tuple(_REGISTRY)


def builtin(name: str, epsilon: float = 1.0) -> ManifoldSpec:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise UnknownBuiltin(name) from None
    return factory(float(epsilon))
