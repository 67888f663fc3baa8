"""Algebraic formulas, circuits and ABPs.

A :class:`Circuit` is a list of gates in topological order (children always
precede their parent).  For ``kind == "formula"`` the gate graph must be a
tree rooted at the output and its size is the number of leaves; for
``kind == "circuit"`` the size is nodes plus edges.  An :class:`ABP` is a
DAG with affine edge labels whose size is its edge count.

Formal degree follows the usual induction: leaves count 1, sum gates take
the max and product gates the sum of their children.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Mapping, Sequence, Union

from .algebra import FieldElement, FieldSpec, MultiPoly, UniPoly
from .budgets import budget
from .errors import DomainError, FormatError, ResourceError, SpecMismatchError

LEAF_OPS = ("var", "const")
GATE_OPS = ("add", "mul")


@dataclass(frozen=True)
class Node:
    op: str
    arg: Union[int, tuple[int, ...]]  # var index, constant value, or child indices


@dataclass(frozen=True)
class Circuit:
    field: FieldSpec
    nodes: tuple[Node, ...]
    output: int
    kind: str = "formula"
    num_vars: int = 0

    def __post_init__(self):
        if self.kind not in ("formula", "circuit"):
            raise FormatError(f"kind: expected 'formula' or 'circuit', got {self.kind!r}")
        if not 0 <= self.output < len(self.nodes):
            raise FormatError(f"output: index {self.output} outside 0..{len(self.nodes) - 1}")
        max_var = -1
        parents = [0] * len(self.nodes)
        for i, nd in enumerate(self.nodes):
            if nd.op == "var":
                if nd.arg < 0:
                    raise FormatError(f"nodes[{i}].index: negative variable index")
                max_var = max(max_var, nd.arg)
            elif nd.op == "const":
                if self.field.reduce(nd.arg) != nd.arg:
                    raise FormatError(f"nodes[{i}].value: {nd.arg} is not canonical in {self.field}")
            elif nd.op in GATE_OPS:
                if not nd.arg:
                    raise FormatError(f"nodes[{i}].children: gate without children")
                for ch in nd.arg:
                    if not 0 <= ch < i:
                        raise FormatError(f"nodes[{i}].children: {ch} does not precede the gate")
                    parents[ch] += 1
            else:
                raise FormatError(f"nodes[{i}].op: unknown operation {nd.op!r}")
        if self.num_vars < max_var + 1:
            object.__setattr__(self, "num_vars", max_var + 1)
        if self.kind == "formula":
            for i, p in enumerate(parents):
                if i == self.output:
                    if p:
                        raise FormatError("output: formula root has a parent")
                elif p != 1:
                    raise FormatError(f"nodes[{i}]: formula gates need exactly one parent, found {p}")

    @property
    def size(self) -> int:
        if self.kind == "formula":
            return sum(1 for nd in self.nodes if nd.op in LEAF_OPS)
        return len(self.nodes) + sum(len(nd.arg) for nd in self.nodes if nd.op in GATE_OPS)

    @property
    def leaf_count(self) -> int:
        return sum(1 for nd in self.nodes if nd.op in LEAF_OPS)

    @property
    def formal_degree(self) -> int:
        deg: list[int] = []
        for nd in self.nodes:
            if nd.op in LEAF_OPS:
                deg.append(1)
            elif nd.op == "add":
                deg.append(max(deg[c] for c in nd.arg))
            else:
                deg.append(sum(deg[c] for c in nd.arg))
        return deg[self.output]

    def variables(self) -> set[int]:
        return {nd.arg for nd in self.nodes if nd.op == "var"}


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    coeffs: tuple[int, ...]
    const: int = 0


@dataclass(frozen=True)
class ABP:
    field: FieldSpec
    num_vars: int
    num_vertices: int
    start: int
    end: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        for j, e in enumerate(self.edges):
            if not (0 <= e.src < e.dst < self.num_vertices):
                raise FormatError(f"edges[{j}]: vertices must satisfy 0 <= src < dst < {self.num_vertices}")
            if len(e.coeffs) != self.num_vars:
                raise FormatError(f"edges[{j}].coeffs: expected {self.num_vars} coefficients")
            if e.dst == self.start:
                raise FormatError("start: the start vertex must have in-degree 0")
            if e.src == self.end:
                raise FormatError("end: the end vertex must have out-degree 0")
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: (e.src, e.dst))))

    @property
    def size(self) -> int:
        return len(self.edges)

    @property
    def formal_degree(self) -> int:
        longest = [None] * self.num_vertices
        longest[self.start] = 0
        for e in self.edges:
            if longest[e.src] is not None:
                cand = longest[e.src] + 1
                if longest[e.dst] is None or cand > longest[e.dst]:
                    longest[e.dst] = cand
        return longest[self.end] or 0


@dataclass(frozen=True)
class SizeReport:
    model: str
    size: int
    formal_degree: int


def size_report(c: Circuit | ABP) -> SizeReport:
    model = "abp" if isinstance(c, ABP) else c.kind
    return SizeReport(model, c.size, c.formal_degree)


# ---------------------------------------------------------------- building


class Builder:
    """Append-only gate list used to assemble circuits."""

    def __init__(self, field: FieldSpec):
        self.field = field
        self.nodes: list[Node] = []

    def _push(self, node: Node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def var(self, i: int) -> int:
        return self._push(Node("var", i))

    def const(self, c: int) -> int:
        return self._push(Node("const", self.field.reduce(c)))

    def add(self, *children: int) -> int:
        return children[0] if len(children) == 1 else self._push(Node("add", tuple(children)))

    def mul(self, *children: int) -> int:
        return children[0] if len(children) == 1 else self._push(Node("mul", tuple(children)))

    def embed(self, c: Circuit, var_map: Mapping[int, int] | None = None) -> int:
        """Copy all gates of ``c``; var leaves listed in ``var_map`` become references."""
        offset: dict[int, int] = {}
        for i, nd in enumerate(c.nodes):
            if nd.op == "var" and var_map is not None and nd.arg in var_map:
                offset[i] = var_map[nd.arg]
            elif nd.op in GATE_OPS:
                offset[i] = self._push(Node(nd.op, tuple(offset[ch] for ch in nd.arg)))
            else:
                offset[i] = self._push(nd)
        return offset[c.output]

    def build(self, output: int, kind: str = "formula", num_vars: int = 0) -> Circuit:
        return Circuit(self.field, tuple(self.nodes), output, kind, num_vars)


def _point_values(field: FieldSpec, point: Sequence) -> list[int]:
    out = []
    for x in point:
        if isinstance(x, FieldElement):
            if x.field != field:
                raise SpecMismatchError(f"point coordinate in {x.field}, circuit over {field}")
            out.append(x.value)
        else:
            out.append(field.reduce(int(x)))
    return out


# ---------------------------------------------------------------- operations


def evaluate(c: Circuit | ABP, point: Sequence) -> FieldElement:
    """Value of the computed polynomial at ``point`` (elements or representatives)."""
    F = c.field
    vals = _point_values(F, point)
    if len(vals) < c.num_vars:
        raise DomainError(f"point has {len(vals)} coordinates but variable {c.num_vars - 1} is used")
    if isinstance(c, ABP):
        return FieldElement(F, _eval_abp(c, vals))
    return FieldElement(F, eval_values(c, vals))


def eval_values(c: Circuit, vals: Sequence[int]) -> int:
    F = c.field
    v: list[int] = []
    for nd in c.nodes:
        if nd.op == "var":
            v.append(vals[nd.arg])
        elif nd.op == "const":
            v.append(nd.arg)
        elif nd.op == "add":
            acc = 0
            for ch in nd.arg:
                acc = F.add(acc, v[ch])
            v.append(acc)
        else:
            acc = 1
            for ch in nd.arg:
                acc = F.mul(acc, v[ch])
            v.append(acc)
    return v[c.output]


def _affine(F: FieldSpec, e: Edge, vals: Sequence[int]) -> int:
    acc = e.const
    for a, x in zip(e.coeffs, vals):
        if a:
            acc = F.add(acc, F.mul(a, x))
    return acc


def _eval_abp(c: ABP, vals: Sequence[int]) -> int:
    F = c.field
    acc = [0] * c.num_vertices
    acc[c.start] = 1
    for e in c.edges:  # sorted by source, so every source is final when used
        if acc[e.src]:
            acc[e.dst] = F.add(acc[e.dst], F.mul(acc[e.src], _affine(F, e, vals)))
    return acc[c.end]


def horner_formula(p: UniPoly, var: int = 0, num_vars: int = 0) -> Circuit:
    """Formula ``(...((p_d x + p_{d-1}) x + p_{d-2}) ...) x + p_0`` with 2d+1 leaves."""
    b = Builder(p.field)
    if p.is_zero():
        return b.build(b.const(0), num_vars=num_vars)
    acc = b.const(p.coeffs[-1])
    for c in reversed(p.coeffs[:-1]):
        acc = b.add(b.mul(acc, b.var(var)), b.const(c))
    return b.build(acc, num_vars=max(num_vars, var + 1 if p.degree > 0 else 0))


def sparse_to_formula(f: MultiPoly) -> Circuit:
    """Sum of ``coefficient * x_i * x_i * ...`` products, one per term."""
    b = Builder(f.field)
    if f.is_zero():
        return b.build(b.const(0), num_vars=f.num_vars)
    summands = []
    for e, c in f.sorted_terms():
        factors = [b.const(c)]
        for i, k in enumerate(e):
            factors.extend(b.var(i) for _ in range(k))
        summands.append(b.mul(*factors))
    return b.build(b.add(*summands), num_vars=f.num_vars)


def compose(p: Circuit, subs: Sequence[Circuit]) -> Circuit:
    """Circuit for ``p(subs[0], subs[1], ...)``.

    Formula inputs are copied once per variable leaf so the result stays a
    tree; if any input is a general circuit each substitute is embedded once.
    """
    used = p.variables()
    if used and max(used) >= len(subs):
        raise DomainError(f"substitution covers {len(subs)} variables, circuit uses {max(used) + 1}")
    for q in subs:
        if q.field != p.field:
            raise SpecMismatchError(f"cannot compose circuits over {p.field} and {q.field}")
    as_formula = p.kind == "formula" and all(q.kind == "formula" for q in subs)
    num_vars = max((q.num_vars for q in subs), default=0)
    b = Builder(p.field)
    shared: dict[int, int] = {}
    index: dict[int, int] = {}
    for i, nd in enumerate(p.nodes):
        if nd.op == "var":
            if as_formula:
                index[i] = b.embed(subs[nd.arg])
            else:
                if nd.arg not in shared:
                    shared[nd.arg] = b.embed(subs[nd.arg])
                index[i] = shared[nd.arg]
        elif nd.op == "const":
            index[i] = b._push(nd)
        else:
            index[i] = b._push(Node(nd.op, tuple(index[ch] for ch in nd.arg)))
    return b.build(index[p.output], "formula" if as_formula else "circuit", num_vars)


def substitute_partial(c: Circuit, assignment: Mapping[int, FieldElement | int]) -> Circuit:
    """Replace assigned variable leaves by constant leaves; size is unchanged."""
    F = c.field
    vals = {i: _point_values(F, [x])[0] for i, x in assignment.items()}
    nodes = tuple(Node("const", vals[nd.arg]) if nd.op == "var" and nd.arg in vals else nd for nd in c.nodes)
    return Circuit(F, nodes, c.output, c.kind, c.num_vars)


def relabel(c: Circuit, mapping: Sequence[int], num_vars: int) -> Circuit:
    """Rename variable i to ``mapping[i]``."""
    nodes = tuple(Node("var", mapping[nd.arg]) if nd.op == "var" else nd for nd in c.nodes)
    return Circuit(c.field, nodes, c.output, c.kind, num_vars)


def projected_terms(num_vars: int, degree: int) -> int:
    """Number of monomials of total degree <= ``degree`` in ``num_vars`` variables."""
    return comb(num_vars + degree, degree)


def _term_bound(c: Circuit) -> int:
    """Syntactic bound on the term count: leaves 1, sums add, products multiply."""
    bound: list[int] = []
    for nd in c.nodes:
        if nd.op in LEAF_OPS:
            bound.append(1)
        elif nd.op == "add":
            bound.append(sum(bound[ch] for ch in nd.arg))
        else:
            v = 1
            for ch in nd.arg:
                v *= bound[ch]
            bound.append(v)
    return max(bound)  # dead gates are expanded too


def expand(c: Circuit | ABP, degree_cap: int | None = None, term_budget: int | None = None) -> MultiPoly:
    """The exact polynomial computed by ``c`` as a sparse :class:`MultiPoly`.

    The projected size is the smaller of the dense monomial count and, for
    circuits, the syntactic term bound of :func:`_term_bound`.
    """
    fdeg = c.formal_degree
    if degree_cap is None:
        degree_cap = fdeg
    if fdeg > degree_cap:
        raise DomainError(f"formal degree {fdeg} exceeds the degree cap {degree_cap}")
    limit = budget("expand_terms") if term_budget is None else term_budget
    projected = projected_terms(c.num_vars, degree_cap)
    if isinstance(c, Circuit) and projected > limit:
        projected = min(projected, _term_bound(c))
    if projected > limit:
        raise ResourceError(
            f"expansion would need up to {projected} terms (budget {limit})", projected=projected
        )
    F, n = c.field, c.num_vars
    if isinstance(c, ABP):
        acc = [MultiPoly.zero(F, n) for _ in range(c.num_vertices)]
        acc[c.start] = MultiPoly.constant(F, n, 1)
        for e in c.edges:
            if acc[e.src].is_zero():
                continue
            label = MultiPoly.constant(F, n, e.const)
            for i, a in enumerate(e.coeffs):
                if a:
                    label = label + MultiPoly.var(F, n, i).scale(a)
            acc[e.dst] = acc[e.dst] + acc[e.src] * label
        return acc[c.end]
    vals: list[MultiPoly] = []
    for nd in c.nodes:
        if nd.op == "var":
            vals.append(MultiPoly.var(F, n, nd.arg))
        elif nd.op == "const":
            vals.append(MultiPoly.constant(F, n, nd.arg))
        elif nd.op == "add":
            acc = vals[nd.arg[0]]
            for ch in nd.arg[1:]:
                acc = acc + vals[ch]
            vals.append(acc)
        else:
            acc = vals[nd.arg[0]]
            for ch in nd.arg[1:]:
                acc = acc * vals[ch]
            vals.append(acc)
    return vals[c.output]
