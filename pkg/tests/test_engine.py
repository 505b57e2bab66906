import math

import pytest

from fuzzytft import gates
from fuzzytft.engine import (
    AnalysisConfig,
    fuzzy_importance,
    evaluate,
    rank_events,
    sweep,
)
from fuzzytft.errors import DomainError, SaturationError
from fuzzytft.model import BasicEvent, FaultTree, GateKind, GateNode, check_valid
from fuzzytft.parser import parse_tree
from fuzzytft.tfn import TFN, fuzzify


def single_leaf_tree(lam=1.2e-3):
    doc = f"event A rate={lam}\ngate T = A\ntop = T"
    return parse_tree(doc)


def single_gate_tree(op, n, spread=None, rates=None):
    rates = rates or [1e-3 * (i + 1) for i in range(n)]
    lines = [f"event E{i} rate={r}" + (f" spread={spread}" if spread else "")
             for i, r in enumerate(rates)]
    expr = f" {op} ".join(f"E{i}" for i in range(n))
    lines.append(f"gate G = {expr}")
    lines.append("top = G")
    return parse_tree("\n".join(lines)), [TFN.crisp(r) if spread is None else fuzzify(r, spread)
                                          for r in rates]


class TestEvaluate:
    def test_single_leaf_crisp(self):
        lam, t = 1.2e-3, 700.0
        tree = single_leaf_tree(lam)
        got = evaluate(tree, t)
        assert got.peak == pytest.approx(-math.expm1(-lam * t), rel=1e-14)
        assert got.is_crisp

    def test_gate_local_consistency(self):
        t = 900.0
        for op, fn in [("AND", gates.fuzzy_and), ("OR", gates.fuzzy_or)]:
            tree, rates = single_gate_tree(op, 3, spread=15)
            probs = [gates.rate_to_prob(r, t) for r in rates]
            assert evaluate(tree, t) == fn(probs)
        for op, fn in [("PAND", gates.fuzzy_pand), ("POR", gates.fuzzy_por)]:
            tree, rates = single_gate_tree(op, 3, spread=15)
            assert evaluate(tree, t) == fn(rates, t)

    def test_or_of_converted_leaves_matches_hand_composition(self):
        # Two supply-line events, fuzzified, OR-ed, at t=1000.
        doc = (
            "directive spread=15\n"
            "event V rate=1.65633E-3\n"
            "event L rate=3.31774E-5\n"
            "gate G = V OR L\n"
            "top = G"
        )
        tree = parse_tree(doc)
        t = 1000.0
        expected = gates.fuzzy_or(
            [
                gates.rate_to_prob(fuzzify(1.65633e-3, 15), t),
                gates.rate_to_prob(fuzzify(3.31774e-5, 15), t),
            ]
        )
        assert evaluate(tree, t) == expected

    def test_gate_feeding_temporal_gate_is_converted(self):
        doc = (
            "event A rate=1e-3\nevent B rate=2e-3\nevent C rate=5e-4\n"
            "gate G = C PAND (A OR B)\n"
            "top = G"
        )
        tree = parse_tree(doc)
        t = 800.0
        # hand-composed: OR output converted to an equivalent rate (for an
        # OR of exponentials the conversion is exact: the rate sum)
        or_prob = gates.fuzzy_or(
            [
                gates.rate_to_prob(TFN.crisp(1e-3), t),
                gates.rate_to_prob(TFN.crisp(2e-3), t),
            ]
        )
        converted = gates.prob_to_rate(or_prob, t)
        assert converted.peak == pytest.approx(3e-3, rel=1e-12)
        expected = gates.fuzzy_pand([TFN.crisp(5e-4), converted], t)
        got = evaluate(tree, t)
        assert got.peak == pytest.approx(expected.peak, rel=1e-12)

    def test_peak_path_equals_crisp_pipeline(self):
        doc = (
            "directive spread=25\n"
            "event A rate=1e-3\nevent B rate=2e-3\nevent C rate=5e-4\n"
            "event D rate=3e-4\nevent E rate=8e-4\n"
            "gate S = A OR B\n"
            "gate P = C PAND S\n"
            "gate Q = D POR E\n"
            "gate T = P OR Q\n"
            "top = T"
        )
        fuzzy_tree = parse_tree(doc)
        crisp_tree = parse_tree(doc.replace("directive spread=25\n", ""))
        for t in (50.0, 400.0, 1600.0):
            fz = evaluate(fuzzy_tree, t)
            cr = evaluate(crisp_tree, t)
            assert cr.is_crisp
            assert fz.peak == pytest.approx(cr.peak, rel=1e-9)

    def test_zero_time(self):
        tree, _ = single_gate_tree("PAND", 2)
        assert evaluate(tree, 0.0) == TFN(0, 0, 0)

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            evaluate(single_leaf_tree(), -5.0)


class TestForcingAndImportance:
    DOC = (
        "event A rate=1e-3\nevent B rate=2e-3\nevent C rate=5e-4\n"
        "gate S = A OR B\n"
        "gate T = C PAND S\n"
        "top = T"
    )

    def test_saturation_requires_forcing_or_clamp(self):
        tree = parse_tree(
            "event A rate=1e-2\nevent B rate=1e-3\n"
            "gate S = A\n"
            "gate T = B PAND S\n"
            "top = T"
        )
        # Saturation starts once P(A) is within 1e-12 of 1 (rate*t > ~27.6).
        t = 1500.0
        assert -math.expm1(-1e-2 * t) < 1.0 - 1e-12
        evaluate(tree, t)  # finite: no clamp needed yet
        t_sat = 3000.0
        with pytest.raises(SaturationError):
            evaluate(tree, t_sat)
        config = AnalysisConfig(times=(t_sat,), clamp=True)
        assert evaluate(tree, t_sat, config).peak <= 1.0

    def test_forced_event_probability(self):
        tree = parse_tree(self.DOC)
        t = 1000.0
        fim = fuzzy_importance(tree, "A", t)
        assert fim >= 0.0

    def test_importance_zero_for_detached_event(self):
        # An event outside every path to the top only warns at validation
        # and cannot influence the result.
        tree = check_valid(
            FaultTree(
                top_id="T",
                events={
                    "A": BasicEvent("A", TFN.crisp(1e-3)),
                    "B": BasicEvent("B", TFN.crisp(2e-3)),
                    "X": BasicEvent("X", TFN.crisp(5e-3)),
                },
                gates={"T": GateNode("T", GateKind.OR, ("A", "B"))},
            )
        )
        assert any(w.code == "unreachable" for w in tree.warnings)
        assert fuzzy_importance(tree, "X", 1000.0) == 0.0

    def test_importance_of_or_leaf(self):
        # For TE = A | B, forcing A certain/impossible swings TE by the
        # survival probability of B, identically in each component.
        doc = "event A rate=1e-3\nevent B rate=2e-3\ngate T = A OR B\ntop = T"
        tree = parse_tree(doc)
        t = 500.0
        fim = fuzzy_importance(tree, "A", t)
        expected = math.sqrt(3) * math.exp(-2e-3 * t)
        assert fim == pytest.approx(expected, rel=1e-12)

    def test_forced_first_input_of_pand(self):
        # Forcing the priority input of a PAND certain saturates its rate;
        # forcing it impossible kills the gate.
        doc = "event A rate=1e-4\nevent B rate=2e-3\ngate T = A PAND B\ntop = T"
        tree = parse_tree(doc)
        t = 1000.0
        from fuzzytft.engine import _Evaluator

        p_one = _Evaluator(tree, t, forcing={"A": 1}).top_probability()
        p_zero = _Evaluator(tree, t, forcing={"A": 0}).top_probability()
        assert p_zero == TFN(0, 0, 0)
        sat_rate = gates.prob_to_rate(TFN.crisp(1.0), t, clamp=True)
        expected = gates.fuzzy_pand([sat_rate, TFN.crisp(2e-3)], t)
        assert p_one == expected

    def test_forced_competitor_of_por_drops_out(self):
        doc = "event A rate=1e-3\nevent B rate=2e-3\nevent C rate=3e-3\ngate T = A POR B POR C\ntop = T"
        tree = parse_tree(doc)
        t = 700.0
        from fuzzytft.engine import _Evaluator

        p = _Evaluator(tree, t, forcing={"B": 0}).top_probability()
        expected = gates.fuzzy_por([TFN.crisp(1e-3), TFN.crisp(3e-3)], t)
        assert p == expected

    def test_unknown_event_rejected(self):
        tree = parse_tree(self.DOC)
        with pytest.raises(DomainError):
            fuzzy_importance(tree, "GHOST", 100.0)


class TestRanking:
    def test_simple_order(self):
        rows = rank_events([("a", 0.2), ("b", 0.1)])
        assert [(r.event_id, r.rank) for r in rows] == [("a", 1), ("b", 2)]

    def test_ties_share_rank_dense(self):
        rows = rank_events([("a", 0.5), ("b", 0.3), ("c", 0.3), ("d", 0.1)])
        assert [(r.event_id, r.rank) for r in rows] == [
            ("a", 1),
            ("b", 2),
            ("c", 2),
            ("d", 3),
        ]

    def test_all_equal(self):
        rows = rank_events([("a", 0.4), ("b", 0.4), ("c", 0.4)])
        assert {r.rank for r in rows} == {1}

    def test_tie_tolerance(self):
        rows = rank_events([("a", 0.5), ("b", 0.5 - 5e-7)])
        assert rows[0].rank == rows[1].rank == 1


class TestSweep:
    DOC = (
        "directive spread=15 times=100,500,1000\n"
        "event A rate=1e-3\nevent B rate=2e-3\n"
        "gate T = A OR B\ntop = T"
    )

    def test_uses_document_times(self):
        tree = parse_tree(self.DOC)
        report = sweep(tree, AnalysisConfig(times=tree.times))
        assert [e.t for e in report.entries] == [100.0, 500.0, 1000.0]

    def test_monotone_defuzzified(self):
        tree = parse_tree(self.DOC)
        report = sweep(tree, AnalysisConfig(times=tuple(range(100, 3100, 100))))
        values = [e.defuzzified for e in report.entries]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_single_time_point(self):
        tree = parse_tree(self.DOC)
        report = sweep(tree, AnalysisConfig(times=(250.0,)))
        assert len(report.entries) == 1
        assert not report.importance

    def test_importance_table_included_when_enabled(self):
        tree = parse_tree(self.DOC)
        config = AnalysisConfig(
            times=(100.0,), importance=True, importance_time=100.0
        )
        report = sweep(tree, config)
        assert len(report.importance) == 2
        assert report.importance_time == 100.0

    def test_importance_requires_time(self):
        with pytest.raises(DomainError):
            AnalysisConfig(times=(100.0,), importance=True)

    def test_times_must_increase(self):
        with pytest.raises(DomainError):
            AnalysisConfig(times=(100.0, 100.0))
        with pytest.raises(DomainError):
            AnalysisConfig(times=())

    def test_deterministic_reports(self):
        tree = parse_tree(self.DOC)
        config = AnalysisConfig(
            times=(100.0, 900.0), importance=True, importance_time=900.0
        )
        a = sweep(tree, config)
        b = sweep(tree, config)
        assert a == b
        assert a.to_csv() == b.to_csv()

    def test_csv_headers_and_precision(self):
        tree = parse_tree(self.DOC)
        report = sweep(tree, AnalysisConfig(times=(100.0,)))
        lines = report.to_csv().splitlines()
        assert lines[0] == "t,te_lower,te_peak,te_upper,te_defuzzified"
        cells = lines[1].split(",")
        assert cells[0] == "100"
        # 8 significant digits
        assert all(len(c.replace(".", "").replace("-", "").lstrip("0")) <= 9 for c in cells[1:])

    def test_defuzzified_is_centroid(self):
        tree = parse_tree(self.DOC)
        report = sweep(tree, AnalysisConfig(times=(400.0,)))
        entry = report.entries[0]
        assert entry.defuzzified == entry.probability.centroid()
        assert entry.peak == entry.probability.peak
