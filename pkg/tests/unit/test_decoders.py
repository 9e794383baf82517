#!/usr/bin/env python3
"""
Tests for the GCD, ASAp and rejection decoders, trace files and the
decoding manager.
"""

import json
import math
import os
import shutil
import tempfile
import unittest

import numpy as np
from scipy.special import logsumexp

from gadkit.decoder import (
    ASApDecoder,
    BudgetDeadEndError,
    DecodeConfig,
    DecodeConfigError,
    DecodingManager,
    EmptyLanguageError,
    GCDDecoder,
    NormalizationCollapseError,
    RejectionDecoder,
    RejectionExhaustedError,
    TraceFormatError,
    read_run_metadata,
    read_traces,
    run_asap,
    sample_gcd,
    sample_rejection,
    write_traces,
)
from gadkit.exact import enumerate_q, sentence_key
from gadkit.grammar import accepts, load_grammar, parse_bnf
from gadkit.lm import sequence_logprob
from gadkit.trie import SamplerTrie

from support import EOS, TINY_MASS_GRAMMAR, binary_instance, table_model, trap_instance, uniform_model


class TestDecodeConfig(unittest.TestCase):

    def test_defaults(self):
        config = DecodeConfig()
        self.assertEqual(config.max_len, 32)
        self.assertEqual(config.seed, 17)

    def test_invalid_values(self):
        for kwargs in [{"max_len": 0}, {"seed": -1}, {"seed": 2 ** 64}, {"iterations": 0},
                       {"rejection_budget": 0}, {"max_len": 2.5}]:
            with self.subTest(**kwargs):
                with self.assertRaises(DecodeConfigError):
                    DecodeConfig(**kwargs)


class TestGCDDecoder(unittest.TestCase):
    """Test grammar-constrained decoding on the binary fixture."""

    def setUp(self):
        self.grammar, self.model = binary_instance()
        self.config = DecodeConfig(max_len=8, seed=11, iterations=400)

    def test_samples_are_grammatical_and_scored(self):
        traces = GCDDecoder(self.model, self.grammar, self.config).run()
        self.assertEqual([t.iteration for t in traces], list(range(1, 401)))
        for trace in traces:
            self.assertTrue(trace.grammatical)
            self.assertEqual(trace.tokens[-1], EOS)
            self.assertTrue(accepts(self.grammar, trace.text))
            self.assertAlmostEqual(trace.log_p, sequence_logprob(self.model, trace.tokens), places=9)
            self.assertGreaterEqual(trace.log_q, trace.log_p - 1e-9)

    def test_gcd_law_of_the_zero_branch(self):
        traces = GCDDecoder(self.model, self.grammar, self.config).run()
        share = sum(t.text == "00000" for t in traces) / len(traces)
        sigma = math.sqrt(0.65 * 0.35 / len(traces))
        self.assertLess(abs(share - 0.65), 4 * sigma)
        zero = next(t for t in traces if t.text == "00000")
        self.assertAlmostEqual(zero.log_q, math.log(0.65), places=9)

    def test_replay_is_deterministic(self):
        decoder = GCDDecoder(self.model, self.grammar, self.config)
        first = [decoder.sample(i).tokens for i in range(1, 30)]
        again = [sample_gcd(self.model, self.grammar, self.config, i).tokens for i in range(1, 30)]
        self.assertEqual(first, again)

    def test_length_cap_dead_end(self):
        decoder = GCDDecoder(self.model, self.grammar, DecodeConfig(max_len=3, seed=1))
        with self.assertRaises(BudgetDeadEndError):
            decoder.sample(1)

    def test_empty_language(self):
        grammar = parse_bnf('S ::= S "a"\n')
        with self.assertRaises(EmptyLanguageError):
            GCDDecoder(uniform_model(["a", "<eos>"], 1), grammar, DecodeConfig())

    def test_normalization_collapse(self):
        grammar = parse_bnf('S ::= "a"\n')
        model = table_model(["a", "b", "<eos>"], 2, [0.0, 1.0, 0.0])
        with self.assertRaises(NormalizationCollapseError):
            GCDDecoder(model, grammar, DecodeConfig()).sample(1)


class TestASApDecoder(unittest.TestCase):
    """Test adaptive decoding."""

    def setUp(self):
        self.grammar, self.model = binary_instance()
        self.config = DecodeConfig(max_len=8, seed=23, iterations=200)

    def test_first_sample_matches_gcd(self):
        for seed in range(10):
            config = DecodeConfig(max_len=8, seed=seed)
            gcd = GCDDecoder(self.model, self.grammar, config).sample(1)
            asap = ASApDecoder(self.model, self.grammar, config).sample(1)
            self.assertEqual(gcd.tokens, asap.tokens)
            self.assertEqual(gcd.log_q, asap.log_q)

    def test_low_mass_sentence_is_visited_at_most_once(self):
        traces, trie = run_asap(self.model, self.grammar, self.config)
        self.assertLessEqual(sum(t.text == "00000" for t in traces), 1)
        self.assertEqual(trie.sample_count, 200)
        self.assertTrue(all(t.grammatical for t in traces))

    def test_trie_values_stay_in_unit_interval(self):
        _, trie = run_asap(self.model, self.grammar, self.config)
        for node in trie.iter_nodes():
            if node.is_expanded:
                self.assertTrue((node.log_ctilde <= 0.0).all())
                self.assertTrue((node.ctilde[~node.mask] == 0.0).all())

    def test_resumed_run_matches_uninterrupted_run(self):
        full, _ = run_asap(self.model, self.grammar, DecodeConfig(max_len=8, seed=5), iterations=40)
        first, trie = run_asap(self.model, self.grammar, DecodeConfig(max_len=8, seed=5), iterations=25)
        second, _ = run_asap(self.model, self.grammar, DecodeConfig(max_len=8, seed=5), trie=trie, iterations=15)
        self.assertEqual([t.iteration for t in second], list(range(26, 41)))
        self.assertEqual([t.tokens for t in first + second], [t.tokens for t in full])

    def test_trap_run_abandons_the_low_mass_branch(self):
        grammar, model = trap_instance()
        traces, trie = run_asap(model, grammar, DecodeConfig(max_len=6, seed=2), iterations=300)
        self.assertLessEqual(sum(t.text.startswith("a") for t in traces), 16)
        self.assertEqual(traces[-1].text, "b")
        self.assertLess(trie.efg([0]), 1e-8)


def explore_every_sentence(trie, exact):
    """Record every sentence of the exact support once."""
    eos = trie.vocabulary.eos_index
    for key in exact.log_support:
        tokens = [int(t) for t in key.split()] + [eos]
        node = trie.expand(trie.root)
        for token in tokens[:-1]:
            node = trie.expand(trie.child(node, token))
        trie.record_and_backpropagate(tokens)


class TestExploredTrie(unittest.TestCase):
    """Once every sentence has been recorded, ASAp samples exactly from Q."""

    INSTANCES = [(binary_instance, 8), (trap_instance, 6)]

    def test_step_conditionals_match_exact_q(self):
        for instance, max_len in self.INSTANCES:
            grammar, model = instance()
            exact = enumerate_q(model, grammar, 16)
            trie = SamplerTrie(model, grammar)
            explore_every_sentence(trie, exact)
            decoder = ASApDecoder(model, grammar, DecodeConfig(max_len=max_len), trie)
            eos = model.vocabulary.eos_index
            for node in trie.iter_nodes():
                log_weights = node.log_probs + decoder.edge_log_values(node)
                sampled = np.exp(log_weights - logsumexp(log_weights))
                efg_here = exact.efg[sentence_key(node.prefix)]
                expected = np.zeros(len(sampled))
                for token in np.flatnonzero(node.mask):
                    efg_next = 1.0 if token == eos else exact.efg.get(sentence_key(node.prefix + (int(token),)), 0.0)
                    expected[token] = node.model_probs[token] * efg_next / efg_here
                np.testing.assert_allclose(sampled, expected, rtol=1e-9, atol=1e-9)

    def test_traces_carry_exact_log_q(self):
        for instance, max_len in self.INSTANCES:
            grammar, model = instance()
            exact = enumerate_q(model, grammar, 16)
            trie = SamplerTrie(model, grammar)
            explore_every_sentence(trie, exact)
            traces, _ = run_asap(model, grammar, DecodeConfig(max_len=max_len, seed=3), trie=trie, iterations=60)
            eos = model.vocabulary.eos_index
            for trace in traces:
                self.assertAlmostEqual(trace.log_q, exact.log_support[sentence_key(trace.tokens, eos)], places=9)


class TestTraceSteps(unittest.TestCase):
    """Each trace's totals are the sums of its recorded steps."""

    def check(self, model, traces):
        for trace in traces:
            self.assertEqual([s.token for s in trace.steps], trace.tokens)
            self.assertAlmostEqual(trace.log_q, sum(s.log_weight - s.log_norm for s in trace.steps), places=12)
            self.assertAlmostEqual(trace.log_p, sum(s.log_p for s in trace.steps), places=12)
            for i, step in enumerate(trace.steps):
                self.assertEqual(step.log_p, model.next_logprobs(trace.tokens[:i])[step.token])

    def test_all_decoders(self):
        for (grammar, model), max_len in [(binary_instance(), 8), (trap_instance(), 6)]:
            config = DecodeConfig(max_len=max_len, seed=5, iterations=150)
            for decoder_class in [GCDDecoder, ASApDecoder, RejectionDecoder]:
                with self.subTest(decoder=decoder_class.__name__, max_len=max_len):
                    self.check(model, decoder_class(model, grammar, config).run())


class TestRejectionDecoder(unittest.TestCase):
    """Test the rejection reference sampler."""

    def setUp(self):
        self.grammar, self.model = binary_instance()

    def test_accepted_samples(self):
        decoder = RejectionDecoder(self.model, self.grammar, DecodeConfig(max_len=8, seed=4, iterations=100))
        traces = decoder.run()
        for trace in traces:
            self.assertTrue(trace.grammatical)
            self.assertEqual(trace.log_q, trace.log_p)
            self.assertGreaterEqual(trace.attempts, 1)
        self.assertEqual(decoder.total_attempts, sum(t.attempts for t in traces))
        # almost every accepted sample comes from the 1-branch
        self.assertTrue(all(t.text.startswith("1") for t in traces))

    def test_single_sample_helper(self):
        config = DecodeConfig(max_len=8, seed=4)
        decoder = RejectionDecoder(self.model, self.grammar, config)
        for iteration in [1, 7, 30]:
            trace = sample_rejection(self.model, self.grammar, config, iteration)
            expected = decoder.sample(iteration)
            self.assertEqual(trace.iteration, iteration)
            self.assertEqual(trace.tokens, expected.tokens)
            self.assertEqual(trace.attempts, expected.attempts)
            self.assertTrue(accepts(self.grammar, trace.text))

    def test_budget_exhausted(self):
        grammar = load_grammar(TINY_MASS_GRAMMAR)
        decoder = RejectionDecoder(self.model, grammar, DecodeConfig(max_len=8, seed=4, rejection_budget=50))
        with self.assertRaises(RejectionExhaustedError) as ctx:
            decoder.sample(1)
        self.assertEqual(ctx.exception.attempts, 50)
        self.assertEqual(decoder.total_attempts, 50)


class TestTraceFiles(unittest.TestCase):

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.grammar, self.model = binary_instance()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_write_and_read(self):
        traces = GCDDecoder(self.model, self.grammar, DecodeConfig(max_len=8, iterations=5)).run()
        path = os.path.join(self.temp_dir, "t.jsonl")
        self.assertEqual(write_traces(path, traces), 5)
        with open(path) as f:
            record = json.loads(f.readline())
        self.assertEqual(set(record), {"iter", "tokens", "text", "log_p", "log_q", "grammatical"})
        loaded = read_traces(path)
        self.assertEqual([t.to_dict() for t in loaded], [t.to_dict() for t in traces])
        self.assertEqual(read_run_metadata(path), {})

    def test_malformed_lines(self):
        path = os.path.join(self.temp_dir, "bad.jsonl")
        for content in ['{"iter": 1\n', '{"iter": 1, "tokens": [2]}\n']:
            with open(path, "w") as f:
                f.write(content)
            with self.assertRaises(TraceFormatError):
                read_traces(path)


class TestDecodingManager(unittest.TestCase):
    """Test end-to-end runs through the manager."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.grammar, self.model = binary_instance()
        self.manager = DecodingManager(self.model, self.grammar)

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_available_decoders(self):
        self.assertEqual(self.manager.get_available_decoders(), ['gcd', 'asap', 'rejection'])
        with self.assertRaises(DecodeConfigError):
            self.manager.create_decoder('beam', DecodeConfig())

    def test_save_run_writes_sidecar(self):
        result = self.manager.run('rejection', DecodeConfig(max_len=8, iterations=20))
        output = os.path.join(self.temp_dir, "runs", "rej.jsonl")
        self.manager.save_run(result, output)
        self.assertEqual(len(read_traces(output)), 20)
        meta = read_run_metadata(output)
        self.assertEqual(meta["decoder"], "rejection")
        self.assertEqual(meta["vocab_fingerprint"], self.model.vocabulary.fingerprint())
        self.assertEqual(meta["total_attempts"], result.total_attempts)
        self.assertIn("started_at", meta["meta"])
        self.assertIn("rejection", result.get_summary())

    def test_snapshot_resume(self):
        snapshot = os.path.join(self.temp_dir, "trie.json")
        full = self.manager.run('asap', DecodeConfig(max_len=8, seed=9, iterations=30))
        part1 = self.manager.run('asap', DecodeConfig(max_len=8, seed=9, iterations=12), trie_out=snapshot)
        part2 = self.manager.run('asap', DecodeConfig(max_len=8, seed=9, iterations=18), trie_in=snapshot)
        self.assertEqual(part2.first_iteration, 13)
        self.assertEqual([t.tokens for t in part1.traces + part2.traces], [t.tokens for t in full.traces])

    def test_snapshot_requires_asap(self):
        with self.assertRaises(DecodeConfigError):
            self.manager.run('gcd', DecodeConfig(), trie_out=os.path.join(self.temp_dir, "t.json"))


if __name__ == '__main__':
    unittest.main()
