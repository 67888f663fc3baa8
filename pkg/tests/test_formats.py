from __future__ import annotations

import json
import random

import pytest

from hsboot import formats
from hsboot.algebra import FieldSpec, MultiPoly
from hsboot.circuits import ABP, Edge, evaluate
from hsboot.designs import build_design
from hsboot.errors import FormatError
from hsboot.hitting import ClassDescriptor, HittingSet, grid_hitting_set

from oracles import formula_eval, random_formula

F5, F256 = FieldSpec.prime(5), FieldSpec.binary(8)


@pytest.mark.parametrize("F", [F5, F256])
def test_circuit_round_trip(F):
    rng = random.Random(3)
    for j in range(20):
        c = random_formula(F, 3, 1 + j % 7, rng)
        text = formats.dumps(formats.to_dict(c))
        back = formats.load_algebraic(json.loads(text))
        assert formats.dumps(formats.to_dict(back)) == text
        pt = (1, 2, 3)
        assert evaluate(back, pt).value == formula_eval(c, pt)


def test_abp_round_trip():
    a = ABP(F5, 2, 3, 0, 2, (Edge(0, 1, (1, 2), 3), Edge(1, 2, (0, 1), 0), Edge(0, 2, (4, 0), 1)))
    d = formats.to_dict(a)
    assert formats.to_dict(formats.load_algebraic(json.loads(formats.dumps(d)))) == d


def test_poly_round_trip_grlex():
    f = MultiPoly(F5, 2, {(0, 0): 1, (2, 0): 3, (1, 1): 4, (0, 1): 2})
    d = formats.to_dict(f)
    # ascending total degree, then ascending exponent tuples
    assert [t[0] for t in d["terms"]] == [[0, 0], [0, 1], [1, 1], [2, 0]]
    assert formats.load_algebraic(d) == f


def test_design_round_trip():
    d = build_design(4, 2, 2)
    back = formats.design_from_dict(json.loads(formats.design_to_json(d)))
    assert back.sets == d.sets and (back.l, back.k, back.r) == (d.l, d.k, d.r)


def test_hitting_set_round_trip():
    h = grid_hitting_set(F5, 2, 1, [0, 1])
    text = formats.hitting_set_to_text(h)
    assert text.splitlines()[0] == "GF(5) 2 1 inf 4 grid"
    back = formats.hitting_set_from_text(text)
    assert back.points == h.points and back.claimed == h.claimed


def test_empty_hitting_set_text():
    h = HittingSet(F5, ClassDescriptor("formula", 2, 1), ())
    back = formats.hitting_set_from_text(formats.hitting_set_to_text(h))
    assert len(back) == 0


@pytest.mark.parametrize("doc, where", [
    ({"field": "GF(5)", "nodes": [{"op": "var"}], "output": 0}, "nodes[0].index"),
    ({"field": "GF(5)", "nodes": [{"op": "pow", "children": [0]}], "output": 0}, "nodes[0].op"),
    ({"field": "GF(6)", "nodes": [], "output": 0}, "field"),
    ({"nodes": [], "output": 0}, "field"),
    ({"field": "GF(5)", "kind": "poly", "num_vars": 2, "terms": [[[1], 1]]}, "terms[0][0]"),
    ({"field": "GF(5)", "kind": "poly", "num_vars": 1, "terms": [[[1], "x"]]}, "terms[0][1]"),
    ({"field": "GF(5)", "kind": "abp", "num_vars": 1, "num_vertices": 2, "start": 0, "end": 1,
      "edges": [{"src": 0, "coeffs": [1]}]}, "edges[0].dst"),
])
def test_malformed_inputs_name_the_field(doc, where):
    with pytest.raises(FormatError, match=__import__("re").escape(where)):
        formats.load_algebraic(doc)


@pytest.mark.parametrize("text, where", [
    ("", "header"),
    ("GF(5) 2 1 inf 1\n0 0\n", "header"),
    ("GF(5) 2 x inf 1 g\n0 0\n", "header.d"),
    ("GF(5) 2 1 inf 2 g\n0 0\n", "header.count"),
    ("GF(5) 2 1 inf 1 g\n0 7\n", "points[0]"),
    ("GF(5) 2 1 inf 1 g\n0\n", "points[0]"),
])
def test_malformed_hitting_sets(text, where):
    with pytest.raises(FormatError, match=__import__("re").escape(where)):
        formats.hitting_set_from_text(text)


def test_malformed_json_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(FormatError, match="malformed JSON"):
        formats.read_json(p)


def test_write_atomic_and_manifest_round_trip(tmp_path):
    target = tmp_path / "sub" / "a.txt"
    formats.write_atomic(target, "hello\n")
    assert target.read_text() == "hello\n"
    assert [p.name for p in target.parent.iterdir()] == ["a.txt"]
    m = formats.RunManifest(["x"], 7, formats.config_digest({"a": 1}))
    m.record("a.txt", b"hello\n")
    d = m.to_dict()
    assert formats.RunManifest.from_dict(json.loads(formats.dumps(d))).to_dict() == d
    assert d["outputs"]["a.txt"] == formats.sha256_bytes(b"hello\n")
