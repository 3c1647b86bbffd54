"""JSON file format for ensembles, measurements and group descriptions.

Matrices are row-major lists of rows, each entry a ``[re, im]`` pair (a bare
real number is accepted as well)::

    {"dim": 2,
     "states": [{"p": 0.5, "rho": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}, ...],
     "povm": [<matrix>, ...]}

Instead of ``"states"`` a file may give ``"group"`` (list of unitaries) and
``"rho0"``; the ensemble is then generated by the group with a uniform prior.
Validation errors name the offending entry, e.g. ``states[2].p``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ensembles import NEG_CLAMP, Ensemble, Povm
from .errors import ValidationError
from .symmetric import GeoUniformSpec, UnitaryGroup, generate_ensemble


@dataclass(frozen=True)
class LoadedInput:
    ensemble: Ensemble
    povm: Povm | None = None
    spec: GeoUniformSpec | None = None


def parse_matrix(raw, path: str, dim: int | None = None) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise ValidationError("matrix must be a non-empty list of rows", path)
    rows = []
    for r, row in enumerate(raw):
        if not isinstance(row, list):
            raise ValidationError("row must be a list", f"{path}[{r}]")
        vals = []
        for c, x in enumerate(row):
            where = f"{path}[{r}][{c}]"
            if isinstance(x, bool):
                raise ValidationError("entry must be a number or [re, im]", where)
            if isinstance(x, (int, float)):
                vals.append(complex(x))
            elif (isinstance(x, list) and len(x) == 2
                  and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x)):
                vals.append(complex(x[0], x[1]))
            else:
                raise ValidationError("entry must be a number or [re, im]", where)
        rows.append(vals)
    size = len(rows)
    if any(len(v) != size for v in rows):
        raise ValidationError("matrix is not square", path)
    if dim is not None and size != dim:
        raise ValidationError(f"matrix is {size}x{size}, expected dim {dim}", path)
    m = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ValidationError("non-finite entry", path)
    return m


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _get(doc: dict, key: str, path: str = ""):
    if key not in doc:
        raise ValidationError(f"missing key {key!r}", path or None)
    return doc[key]


def parse_povm(raw, dim: int | None, path: str = "povm") -> Povm:
    if not isinstance(raw, list) or not raw:
        raise ValidationError("POVM must be a non-empty list of matrices", path)
    ops = [parse_matrix(m, f"{path}[{j}]", dim) for j, m in enumerate(raw)]
    if dim is None and len({o.shape for o in ops}) > 1:
        raise ValidationError("POVM elements differ in size", path)
    return Povm(np.array(ops))


def parse_group(raw, dim: int | None, path: str = "group") -> UnitaryGroup:
    if not isinstance(raw, list) or not raw:
        raise ValidationError("group must be a non-empty list of matrices", path)
    return UnitaryGroup(tuple(parse_matrix(u, f"{path}[{k}]", dim) for k, u in enumerate(raw)))


def parse_input(doc) -> LoadedInput:
    """Build an ensemble (plus optional POVM and group spec) from a decoded JSON object."""
    if not isinstance(doc, dict):
        raise ValidationError("top level must be a JSON object")
    dim = _get(doc, "dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ValidationError(f"dim must be a positive integer, got {dim!r}", "dim")
    spec = None
    if "group" in doc:
        if "states" in doc:
            raise ValidationError("give either 'states' or 'group' + 'rho0', not both")
        group = parse_group(doc["group"], dim)
        rho0 = parse_matrix(_get(doc, "rho0"), "rho0", dim)
        v = parse_matrix(doc["V"], "V", dim) if "V" in doc else None
        spec = GeoUniformSpec(rho0, group, v)
        try:
            ensemble = generate_ensemble(spec)
        except ValidationError as exc:
            raise ValidationError(f"rho0 does not generate valid states: {exc}", "rho0") from None
    else:
        states = _get(doc, "states")
        if not isinstance(states, list) or not states:
            raise ValidationError("must be a non-empty list", "states")
        probs, rhos = [], []
        for i, st in enumerate(states):
            where = f"states[{i}]"
            if not isinstance(st, dict):
                raise ValidationError("state entry must be an object", where)
            p = _get(st, "p", where)
            if isinstance(p, bool) or not isinstance(p, (int, float)) or not np.isfinite(p):
                raise ValidationError(f"probability must be a finite number, got {p!r}", f"{where}.p")
            if p < -NEG_CLAMP:
                raise ValidationError(f"negative probability {p!r}", f"{where}.p")
            probs.append(max(float(p), 0.0))
            rhos.append(parse_matrix(_get(st, "rho", where), f"{where}.rho", dim))
        total = sum(probs)
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"probabilities sum to {total!r}, not 1", "states[*].p")
        ensemble = Ensemble(np.array(probs), np.array(rhos))
    povm = parse_povm(doc["povm"], dim) if "povm" in doc else None
    return LoadedInput(ensemble, povm, spec)


def _read_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read file: {exc.strerror}", str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc.msg} (line {exc.lineno})", str(path)) from None


def load_input(path) -> LoadedInput:
    return parse_input(_read_json(path))


def load_povm(path, dim: int | None = None) -> Povm:
    """Read a measurement file: a bare list of matrices or an object with a ``"povm"`` key."""
    doc = _read_json(path)
    if isinstance(doc, dict):
        doc = _get(doc, "povm")
    return parse_povm(doc, dim)


def load_symmetry_spec(path, dim: int | None = None) -> dict:
    """Read ``{"group": [...], "pi0": <matrix>, "V": <matrix>}`` (``V`` optional)."""
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise ValidationError("top level must be a JSON object", str(path))
    group = parse_group(_get(doc, "group"), dim)
    d = group.dim
    out = {"group": group, "pi0": parse_matrix(_get(doc, "pi0"), "pi0", d), "V": None}
    if "V" in doc:
        out["V"] = parse_matrix(doc["V"], "V", d)
    return out


def dump_input(e: Ensemble, povm: Povm | None = None) -> dict:
    doc = {"dim": e.dim,
           "states": [{"p": float(p), "rho": encode_matrix(r)} for p, r in zip(e.probs, e.states)]}
    if povm is not None:
        doc["povm"] = dump_povm(povm)
    return doc


def dump_povm(povm: Povm) -> list:
    return [encode_matrix(op) for op in povm.ops]


def save_json(doc, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
