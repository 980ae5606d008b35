import json
import os
from pathlib import Path

import pytest

import qclift

DATA = Path(os.environ.get("QCLIFT_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def load(rel):
    return json.loads((DATA / rel).read_text())


def test_inner_product_discrepancy():
    rep = qclift.analyze_gadget("ip1")
    # AND on one bit: the best rectangles reach |sum| = 2 out of 4 cells.
    assert rep["disc"] == "1/2"


def test_parity3_needs_three_queries():
    out = qclift.decision_tree(load("problems/parity3.json"))
    assert out["depth"] == 3


def test_lift_parity_completes():
    proto = qclift.canonical_protocol(load("problems/parity2.json"), "ip2")
    res = qclift.lift(proto, "ip2", "01")
    assert res["status"] == "done"
    assert res["output"] == "1"


def test_rational_canonical():
    assert qclift.rational("0.125") == "1/8"
    assert qclift.rational("6/8") == "3/4"


def test_errors_are_typed():
    with pytest.raises(qclift.Error):
        qclift.analyze_gadget("no-such-gadget")
    with pytest.raises(qclift.Error):
        qclift.lift({"n": 1}, "ip2", "0")


def test_empty_corpus_has_no_failures():
    rep = qclift.verify(DATA / "corpus" / "empty.json")
    assert rep["failures"] == 0
    assert rep["sections"] == []
