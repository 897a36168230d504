"""TOML manifests.

A manifest has the sections ``[manifold]``, ``[metric]``, ``[structure]``,
``[soliton]``, ``[params]``, ``[sampling]`` and ``[tolerances]``; only the
first two are required. Expressions are strings (bare numbers are accepted
too). Unknown sections or keys are rejected.

Example::

    [manifold]
    name = "kenmotsu3"
    coords = ["x", "y", "z"]
    epsilon = 1

    [metric]
    g = [["exp(2*z)", "0", "0"], ["0", "exp(2*z)", "0"], ["0", "0", "eps"]]

    [structure]
    phi = [["0", "-1", "0"], ["1", "0", "0"], ["0", "0", "0"]]
    xi = ["0", "0", "1"]

    [soliton]
    V = ["0", "alpha", "0"]
    lambda = "2*eps"

    [params]
    alpha = 1.5

    [sampling]
    points = [[0, 0, 0], [0.3, -0.2, 0.1]]
    box = { lo = [-2, -2, -1.5], hi = [2, 2, 1.5], count = 5 }
    seed = 0

    [tolerances]
    default = 1e-8
    "kenmotsu.condition" = 1e-9
"""

from __future__ import annotations

import re
import sys
from pathlib import Path

from kenmotsu.manifold import ManifoldSpec, Sampling, SolitonBlock, StructureBlock

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ManifestError(ValueError):
    pass


SECTIONS = {
    "manifold": ({"name", "coords", "epsilon", "dim"}, {"coords"}),
    "metric": ({"g"}, {"g"}),
    "structure": ({"phi", "xi", "eta"}, {"phi", "xi"}),
    "soliton": ({"V", "lambda"}, {"V"}),
    "sampling": ({"points", "box", "seed"}, set()),
}
BOX_KEYS = {"lo", "hi", "count"}

# first dotted component of a per-check tolerance key
TOLERANCE_GROUPS = {
    "default",
    "structure",
    "kenmotsu",
    "contact",
    "soliton",
    "space_form",
    "phi_sectional",
    "conformal",
    "eta_einstein",
    "einstein",
    "phi_symmetric",
    "lie_curvature",
    "dim3",
    "consistency",
}
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


def _keys(section: str, table, allowed, required):
    if not isinstance(table, dict):
        raise ManifestError(f"[{section}] must be a table")
    for k in table:
        if k not in allowed:
            raise ManifestError(f"unknown key {k!r} in [{section}]")
    for k in required:
        if k not in table:
            raise ManifestError(f"[{section}] is missing {k!r}")


def _number(section, key, v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ManifestError(f"[{section}] {key} must be a number")
    return float(v)


def parse_manifest(text: str, default_name: str = "manifest") -> ManifoldSpec:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ManifestError(f"malformed manifest: {exc}") from None
    allowed = set(SECTIONS) | {"params", "tolerances"}
    for name in doc:
        if name not in allowed:
            raise ManifestError(f"unknown section [{name}]")
    for name in ("manifold", "metric"):
        if name not in doc:
            raise ManifestError(f"missing section [{name}]")
    for name, (keys, req) in SECTIONS.items():
        if name in doc:
            _keys(name, doc[name], keys, req)

    m = doc["manifold"]
    coords = m["coords"]
    if not isinstance(coords, list) or not all(isinstance(c, str) for c in coords):
        raise ManifestError("[manifold] coords must be a list of names")
    if "dim" in m and m["dim"] != len(coords):
        raise ManifestError(f"[manifold] dim = {m['dim']} but {len(coords)} coordinates are named")
    epsilon = _number("manifold", "epsilon", m.get("epsilon", 1))

    structure = None
    if "structure" in doc:
        s = doc["structure"]
        structure = StructureBlock(s["phi"], s["xi"], s.get("eta"))
    soliton = None
    if "soliton" in doc:
        s = doc["soliton"]
        soliton = SolitonBlock(s["V"], s.get("lambda", "0"))

    for name in ("params", "tolerances"):
        if not isinstance(doc.get(name, {}), dict):
            raise ManifestError(f"[{name}] must be a table")
    params = {}
    for k, v in doc.get("params", {}).items():
        if not _IDENT.match(k):
            raise ManifestError(f"invalid parameter name {k!r}")
        params[k] = _number("params", k, v)

    sampling = Sampling()
    if "sampling" in doc:
        s = doc["sampling"]
        box = s.get("box")
        lo = hi = None
        count = 0
        if box is not None:
            _keys("sampling.box", box, BOX_KEYS, BOX_KEYS)
            lo, hi, count = box["lo"], box["hi"], box["count"]
            if len(lo) != len(coords) or len(hi) != len(coords):
                raise ManifestError("[sampling] box bounds need one entry per coordinate")
            if not isinstance(count, int) or count < 0:
                raise ManifestError("[sampling] box count must be a non-negative integer")
        seed = s.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ManifestError("[sampling] seed must be an integer")
        sampling = Sampling(tuple(s.get("points", ())), lo, hi, count, seed)

    tolerances = {}
    for k, v in doc.get("tolerances", {}).items():
        if k.split(".")[0] not in TOLERANCE_GROUPS:
            raise ManifestError(f"unknown tolerance key {k!r}")
        tolerances[k] = _number("tolerances", k, v)

    try:
        return ManifoldSpec(
            name=m.get("name", default_name),
            coords=tuple(coords),
            epsilon=epsilon,
            metric=doc["metric"]["g"],
            structure=structure,
            soliton=soliton,
            params=params,
            sampling=sampling,
            tolerances=tolerances,
        )
    except (TypeError, ValueError) as exc:
        # SpecError and expression errors alike
        raise ManifestError(str(exc)) from None


def load_manifest(path) -> ManifoldSpec:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_manifest(text, Path(path).stem)
