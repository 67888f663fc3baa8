"""File formats: circuits, ABPs, polynomials, designs, hitting sets, manifests.

JSON output is canonical (sorted keys where order is free, compact
separators, trailing newline) so equal objects give equal bytes.  Every
loader raises :class:`FormatError` naming the offending field.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .algebra import FieldSpec, MultiPoly
from .circuits import ABP, Circuit, Edge, Node
from .designs import Design
from .errors import FormatError, HsbootError
from .hitting import ClassDescriptor, HittingSet

FORMAT_VERSIONS = {
    "circuit": 1,
    "abp": 1,
    "poly": 1,
    "design": 1,
    "hitting-set": 1,
    "cost-report": 1,
    "manifest": 1,
}


def dumps(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=True) + "\n"


def write_atomic(path: str | os.PathLike, data: str | bytes) -> None:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode() if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def read_json(path: str | os.PathLike) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{Path(path).name}: malformed JSON ({exc.msg})") from None


# ------------------------------------------------------------------ helpers


def _get(d: Any, key: str, where: str, kind: type | tuple = object):
    if not isinstance(d, dict):
        raise FormatError(f"{where}: expected an object")
    if key not in d:
        raise FormatError(f"{where}.{key}: missing")
    v = d[key]
    if kind is int and (isinstance(v, bool) or not isinstance(v, int)):
        raise FormatError(f"{where}.{key}: expected an integer")
    if kind is not object and kind is not int and not isinstance(v, kind):
        raise FormatError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}")
    return v


def _int_list(v: Any, where: str) -> list[int]:
    if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in v):
        raise FormatError(f"{where}: expected a list of integers")
    return v


def field_from(d: dict, where: str = "") -> FieldSpec:
    text = _get(d, "field", where or "$", str)
    try:
        return FieldSpec.parse(text)
    except HsbootError as exc:
        raise FormatError(f"{where or '$'}.field: {exc}") from None


# ------------------------------------------------------------------ circuits


def circuit_to_dict(c: Circuit) -> dict:
    nodes = []
    for nd in c.nodes:
        if nd.op == "var":
            nodes.append({"op": "var", "index": nd.arg})
        elif nd.op == "const":
            nodes.append({"op": "const", "value": nd.arg})
        else:
            nodes.append({"op": nd.op, "children": list(nd.arg)})
    return {"field": str(c.field), "kind": c.kind, "num_vars": c.num_vars, "nodes": nodes, "output": c.output}


def circuit_from_dict(d: dict) -> Circuit:
    F = field_from(d)
    raw = _get(d, "nodes", "$", list)
    nodes = []
    for i, nd in enumerate(raw):
        where = f"nodes[{i}]"
        op = _get(nd, "op", where, str)
        if op == "var":
            nodes.append(Node("var", _get(nd, "index", where, int)))
        elif op == "const":
            v = _get(nd, "value", where, int)
            if v < 0:
                raise FormatError(f"{where}.value: negative constant")
            nodes.append(Node("const", v))
        elif op in ("add", "mul"):
            nodes.append(Node(op, tuple(_int_list(_get(nd, "children", where), f"{where}.children"))))
        else:
            raise FormatError(f"{where}.op: unknown operation {op!r}")
    kind = d.get("kind", "formula")
    num_vars = d.get("num_vars", 0)
    if isinstance(num_vars, bool) or not isinstance(num_vars, int) or num_vars < 0:
        raise FormatError("num_vars: expected a non-negative integer")
    return Circuit(F, tuple(nodes), _get(d, "output", "$", int), kind, num_vars)


def abp_to_dict(a: ABP) -> dict:
    return {"field": str(a.field), "kind": "abp", "num_vars": a.num_vars, "num_vertices": a.num_vertices,
            "start": a.start, "end": a.end,
            "edges": [{"src": e.src, "dst": e.dst, "coeffs": list(e.coeffs), "const": e.const} for e in a.edges]}


def abp_from_dict(d: dict) -> ABP:
    F = field_from(d)
    edges = []
    for j, e in enumerate(_get(d, "edges", "$", list)):
        where = f"edges[{j}]"
        coeffs = tuple(F.reduce(x) for x in _int_list(_get(e, "coeffs", where), f"{where}.coeffs"))
        const = e.get("const", 0) if isinstance(e, dict) else 0
        if isinstance(const, bool) or not isinstance(const, int):
            raise FormatError(f"{where}.const: expected an integer")
        edges.append(Edge(_get(e, "src", where, int), _get(e, "dst", where, int), coeffs, F.reduce(const)))
    return ABP(F, _get(d, "num_vars", "$", int), _get(d, "num_vertices", "$", int),
               _get(d, "start", "$", int), _get(d, "end", "$", int), tuple(edges))


# ------------------------------------------------------------------ polynomials


def poly_to_dict(f: MultiPoly) -> dict:
    return {"field": str(f.field), "kind": "poly", "num_vars": f.num_vars,
            "terms": [[list(e), c] for e, c in f.sorted_terms()]}


def poly_from_dict(d: dict) -> MultiPoly:
    F = field_from(d)
    n = _get(d, "num_vars", "$", int)
    if n < 0:
        raise FormatError("num_vars: expected a non-negative integer")
    terms: dict[tuple[int, ...], int] = {}
    for j, t in enumerate(_get(d, "terms", "$", list)):
        where = f"terms[{j}]"
        if not isinstance(t, list) or len(t) != 2:
            raise FormatError(f"{where}: expected [exponents, coefficient]")
        e = tuple(_int_list(t[0], f"{where}[0]"))
        if len(e) != n or any(x < 0 for x in e):
            raise FormatError(f"{where}[0]: expected {n} non-negative exponents")
        c = t[1]
        if isinstance(c, bool) or not isinstance(c, int):
            raise FormatError(f"{where}[1]: expected an integer coefficient")
        terms[e] = F.add(terms.get(e, 0), F.reduce(c))
    return MultiPoly(F, n, terms)


def load_algebraic(d: dict) -> Circuit | ABP | MultiPoly:
    """Dispatch on the ``kind`` field (circuits default when absent)."""
    kind = d.get("kind", "formula") if isinstance(d, dict) else None
    if kind is None:
        raise FormatError("$: expected an object")
    if kind == "poly":
        return poly_from_dict(d)
    if kind == "abp":
        return abp_from_dict(d)
    return circuit_from_dict(d)


def to_dict(obj) -> dict:
    if isinstance(obj, Circuit):
        return circuit_to_dict(obj)
    if isinstance(obj, ABP):
        return abp_to_dict(obj)
    if isinstance(obj, MultiPoly):
        return poly_to_dict(obj)
    raise TypeError(type(obj).__name__)


# ------------------------------------------------------------------ designs


def design_to_json(d: Design) -> str:
    return d.to_json() + "\n"


def design_from_dict(d: dict) -> Design:
    sets = []
    for i, s in enumerate(_get(d, "sets", "$", list)):
        sets.append(tuple(_int_list(s, f"sets[{i}]")))
    return Design(_get(d, "l", "$", int), _get(d, "k", "$", int), _get(d, "r", "$", int), tuple(sets))


# ------------------------------------------------------------------ hitting sets


def hitting_set_to_text(h: HittingSet) -> str:
    c = h.claimed
    prov = "-".join(h.provenance.split()) or "-"
    lines = [f"{h.field} {c.n} {c.d} {'inf' if c.s is None else c.s} {len(h)} {prov}"]
    lines.extend(" ".join(map(str, p)) for p in h.points)
    return "\n".join(lines) + "\n"


def hitting_set_from_text(text: str, model: str = "formula") -> HittingSet:
    lines = text.splitlines()
    if not lines:
        raise FormatError("header: empty file")
    head = lines[0].split()
    if len(head) != 6:
        raise FormatError("header: expected 'field n d s count provenance'")
    try:
        F = FieldSpec.parse(head[0])
    except HsbootError as exc:
        raise FormatError(f"header.field: {exc}") from None
    names = ("n", "d", "s", "count")
    vals = []
    for name, tok in zip(names, head[1:5]):
        if name == "s" and tok == "inf":
            vals.append(None)
            continue
        try:
            vals.append(int(tok))
        except ValueError:
            raise FormatError(f"header.{name}: expected an integer, got {tok!r}") from None
    n, d, s, count = vals
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != count:
        raise FormatError(f"header.count: declares {count} points, file has {len(body)}")
    pts = []
    for j, ln in enumerate(body):
        try:
            p = tuple(int(x) for x in ln.split())
        except ValueError:
            raise FormatError(f"points[{j}]: non-integer coordinate") from None
        if len(p) != n:
            raise FormatError(f"points[{j}]: expected {n} coordinates, found {len(p)}")
        if any(not 0 <= x < F.order for x in p):
            raise FormatError(f"points[{j}]: coordinate outside {F}")
        pts.append(p)
    try:
        cls = ClassDescriptor(model, n, d, s)
    except HsbootError as exc:
        raise FormatError(f"header: {exc}") from None
    return HittingSet(F, cls, tuple(pts), head[5], dedupe=False)


def read_hitting_set(path: str | os.PathLike) -> HittingSet:
    try:
        return hitting_set_from_text(Path(path).read_text())
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from None


# ------------------------------------------------------------------ manifests


@dataclass
class RunManifest:
    argv: list[str]
    seed: int
    config_digest: str | None = None
    wall_clock: float = 0.0
    outputs: dict[str, str] = field(default_factory=dict)
    formats: dict[str, int] = field(default_factory=lambda: dict(FORMAT_VERSIONS))

    def record(self, name: str, data: bytes) -> None:
        self.outputs[name] = sha256_bytes(data)

    def to_dict(self) -> dict:
        return {"argv": self.argv, "seed": self.seed, "config_digest": self.config_digest,
                "wall_clock_seconds": round(self.wall_clock, 6), "outputs": dict(sorted(self.outputs.items())),
                "formats": self.formats}

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        return cls(list(_get(d, "argv", "$", list)), _get(d, "seed", "$", int), d.get("config_digest"),
                   float(d.get("wall_clock_seconds", 0.0)), dict(d.get("outputs", {})),
                   dict(d.get("formats", FORMAT_VERSIONS)))


def config_digest(cfg: Any) -> str:
    return sha256_bytes(dumps(cfg).encode())
