#!/usr/bin/env python3
"""
Tests for predicates, windowed convergence series and report files.
"""

import json
import math
import os
import shutil
import tempfile
import unittest

import numpy as np
import pandas as pd

from gadkit.decoder import DecodeConfig, DecodingManager, SampleTrace
from gadkit.exact import ExactDistribution, enumerate_gcd, enumerate_q, exact_dump, save_exact
from gadkit.metrics import (
    FingerprintMismatchError,
    PredicateError,
    PredicateKind,
    SupportMismatchError,
    WindowError,
    build_report,
    compare_decoders,
    empirical_distribution,
    empirical_tv,
    expectation_series,
    kl_series,
    parse_predicate,
    report_file,
    tv_series,
)

from support import binary_instance, trap_instance


def trace(i, tokens, text, log_p=-1.0, log_q=-1.0, grammatical=True):
    return SampleTrace(iteration=i, tokens=tokens, text=text, log_p=log_p, log_q=log_q, grammatical=grammatical)


def coin(sequence):
    """Traces over the one-token sentences "0" and "1" (EOS = 2)."""
    return [trace(i + 1, [int(ch), 2], ch) for i, ch in enumerate(sequence)]


FAIR = ExactDistribution(kind="q", log_support={"0": math.log(0.5), "1": math.log(0.5)},
                         log_p={}, texts={"0": "0", "1": "1"}, normalizer=1.0, len_bound=1)


class TestPredicates(unittest.TestCase):

    def test_parse(self):
        predicate = parse_predicate("ends_with:1")
        self.assertEqual(predicate.kind, PredicateKind.ENDS_WITH)
        self.assertTrue(predicate("0101"))
        self.assertFalse(predicate("0110"))
        self.assertEqual(str(predicate), "ends_with:1")

    def test_argument_keeps_later_colons(self):
        predicate = parse_predicate("contains:a:b")
        self.assertEqual(predicate.argument, "a:b")
        self.assertTrue(predicate("xa:by"))

    def test_equals_and_grammatical(self):
        self.assertTrue(parse_predicate("equals:00000")("00000"))
        grammatical = parse_predicate("grammatical")
        self.assertTrue(grammatical("anything", True))
        self.assertFalse(grammatical("anything", False))

    def test_errors(self):
        for spec in ["bogus:1", "ends_with", "grammatical:yes", ""]:
            with self.subTest(spec=spec):
                with self.assertRaises(PredicateError):
                    parse_predicate(spec)


class TestSeries(unittest.TestCase):

    def test_kl_window_means(self):
        traces = [trace(i, [0, 2], "0", log_p=-float(i), log_q=0.0) for i in range(1, 5)]
        series = kl_series(traces, 2)
        np.testing.assert_allclose(series.to_numpy(), [1.5, 2.5, 3.5])
        np.testing.assert_allclose(kl_series(traces, 4).to_numpy(), [2.5])

    def test_window_bounds(self):
        traces = coin("0101")
        with self.assertRaises(WindowError):
            kl_series(traces, 5)
        with self.assertRaises(WindowError):
            kl_series(traces, 0)
        with self.assertRaises(WindowError):
            tv_series(traces, FAIR, 5)

    def test_expectation_is_cumulative(self):
        series = expectation_series(coin("1101"), parse_predicate("ends_with:1"))
        self.assertEqual(series.tolist(), [1.0, 1.0, 2 / 3, 0.75])
        self.assertTrue(expectation_series([], parse_predicate("grammatical")).empty)

    def test_tv_series_matches_direct_computation(self):
        traces = coin("0001101110")
        series = tv_series(traces, FAIR, 4)
        self.assertEqual(len(series), 7)
        for k, value in enumerate(series):
            self.assertAlmostEqual(value, empirical_tv(traces[k:k + 4], FAIR), places=12)
        self.assertAlmostEqual(series.iloc[0], 0.25)

    def test_outside_support(self):
        with self.assertRaises(SupportMismatchError):
            empirical_tv(coin("01") + [trace(3, [0, 0, 2], "00")], FAIR)

    def test_empirical_distribution(self):
        self.assertEqual(empirical_distribution(coin("0010")), {"0": 0.75, "1": 0.25})


class TestConvergenceReport(unittest.TestCase):

    def test_frame_and_summary(self):
        traces = coin("01100110")
        report = build_report(traces, 4, parse_predicate("ends_with:1"), exact=FAIR, decoder="gcd")
        frame = report.to_dataframe()
        self.assertEqual(list(frame.columns), ["index", "kl_window", "expectation_gcd", "tv_window"])
        self.assertEqual(len(frame), 8)
        self.assertTrue(pd.isna(frame["kl_window"].iloc[-1]))
        summary = report.summary()
        self.assertEqual(summary["oracle_expectation"], 0.5)
        self.assertEqual(summary["final_expectation"], 0.5)
        self.assertEqual(summary["first_window_tv"], 0.0)

    def test_window_too_large(self):
        with self.assertRaises(WindowError):
            build_report(coin("01"), 3, parse_predicate("grammatical"))


class TestReports(unittest.TestCase):
    """Trace files on disk against an exact dump."""

    @classmethod
    def setUpClass(cls):
        cls.temp_dir = tempfile.mkdtemp()
        grammar, model = binary_instance()
        manager = DecodingManager(model, grammar)
        cls.paths = {}
        for name in ["gcd", "rejection"]:
            result = manager.run(name, DecodeConfig(max_len=8, seed=31, iterations=400))
            cls.paths[name] = manager.save_run(result, os.path.join(cls.temp_dir, f"{name}.jsonl"))
        q = enumerate_q(model, grammar, 16)
        gcd = enumerate_gcd(model, grammar, 16)
        cls.exact_path = os.path.join(cls.temp_dir, "exact.json")
        save_exact(cls.exact_path, exact_dump(q, gcd, {"vocab_fingerprint": model.vocabulary.fingerprint(),
                                                        "grammar_fingerprint": grammar.fingerprint(),
                                                        "model_fingerprint": model.fingerprint()}))

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.temp_dir)

    def test_report_file(self):
        out = os.path.join(self.temp_dir, "reports")
        summary = report_file(self.paths["gcd"], 100, parse_predicate("ends_with:1"), out, self.exact_path)
        self.assertEqual(summary["decoder"], "gcd")
        self.assertAlmostEqual(summary["oracle_expectation"], 0.9, places=9)
        self.assertGreater(summary["oracle_kl_gcd"], 0.0)
        frame = pd.read_csv(os.path.join(out, "gcd_report.csv"))
        self.assertEqual(len(frame), 400)
        with open(os.path.join(out, "gcd_report.csv"), "rb") as f:
            raw = f.read()
        self.assertNotIn(b"\r\n", raw)
        self.assertEqual(raw.count(b"\n"), 401)
        with open(os.path.join(out, "gcd_report.json")) as f:
            self.assertEqual(json.load(f)["window"], 100)

    def test_compare_prefers_rejection(self):
        result = compare_decoders([self.paths["gcd"], self.paths["rejection"]], self.exact_path,
                                  parse_predicate("ends_with:1"), 100)
        self.assertEqual(result["closest"], "rejection")
        names = [d["name"] for d in result["decoders"]]
        self.assertEqual(names, ["gcd", "rejection"])
        self.assertAlmostEqual(result["gcd_oracle_expectation"], 0.315, places=9)
        sigma = math.sqrt(0.9 * 0.1 / 400)
        self.assertLess(abs(result["rejection_expectation"] - 0.9), 4 * sigma)

    def test_fingerprint_mismatch(self):
        grammar, model = trap_instance()
        other = os.path.join(self.temp_dir, "other_exact.json")
        save_exact(other, exact_dump(enumerate_q(model, grammar, 8), None,
                                     {"vocab_fingerprint": model.vocabulary.fingerprint()}))
        with self.assertRaises(FingerprintMismatchError):
            compare_decoders([self.paths["gcd"]], other, parse_predicate("grammatical"), 10)


if __name__ == '__main__':
    unittest.main()
