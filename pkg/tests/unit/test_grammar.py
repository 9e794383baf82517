#!/usr/bin/env python3
"""
Tests for BNF loading, grammar analysis and the incremental recognizer.
"""

import os
import shutil
import tempfile
import unittest

from gadkit.grammar import (
    EmptyGrammarError,
    GrammarSyntaxError,
    GrammarValidator,
    RecognizerStatus,
    TokenTextError,
    UndefinedNonterminalError,
    accepts,
    admissible,
    advance,
    init_state,
    is_prefix,
    load_grammar,
    parse_bnf,
)
from gadkit.grammar.enumerate import all_strings, enumerate_language, enumerate_prefixes

from support import ALL_GRAMMARS, BINARY_GRAMMAR


class TestBnfLoader(unittest.TestCase):
    """Test the BNF dialect parser."""

    def test_binary_grammar_structure(self):
        grammar = load_grammar(BINARY_GRAMMAR)
        self.assertEqual(grammar.start, "S")
        self.assertEqual(set(grammar.nonterminals), {"S", "A2", "A3", "A4", "A5"})
        self.assertEqual(len(grammar.productions), 10)
        self.assertEqual(grammar.alphabet, frozenset("01"))

    def test_root_rule_is_start_even_when_not_first(self):
        grammar = parse_bnf('A ::= "x"\nroot ::= A A\n')
        self.assertEqual(grammar.start, "root")
        self.assertTrue(accepts(grammar, "xx"))

    def test_comments_and_blank_lines(self):
        grammar = parse_bnf('# header\n\nS ::= "a"  # trailing\n')
        self.assertTrue(accepts(grammar, "a"))

    def test_escapes(self):
        grammar = parse_bnf('S ::= "\\"q\\"" | "\\\\"\n')
        self.assertTrue(accepts(grammar, '"q"'))
        self.assertTrue(accepts(grammar, "\\"))

    def test_repeated_rule_lines_add_alternatives(self):
        grammar = parse_bnf('S ::= "a"\nS ::= "b"\n')
        self.assertTrue(accepts(grammar, "a"))
        self.assertTrue(accepts(grammar, "b"))

    def test_unterminated_literal_reports_position(self):
        with self.assertRaises(GrammarSyntaxError) as ctx:
            parse_bnf('S ::= "a"\nT ::= "b\n')
        self.assertEqual(ctx.exception.line, 2)

    def test_missing_separator(self):
        with self.assertRaises(GrammarSyntaxError) as ctx:
            parse_bnf('S = "a"\n')
        self.assertEqual(ctx.exception.line, 1)
        self.assertEqual(ctx.exception.column, 3)

    def test_empty_alternative_is_rejected(self):
        with self.assertRaises(GrammarSyntaxError):
            parse_bnf('S ::= "a" |\n')
        with self.assertRaises(GrammarSyntaxError):
            parse_bnf('S ::= | "a"\n')

    def test_undefined_nonterminal(self):
        with self.assertRaises(UndefinedNonterminalError) as ctx:
            parse_bnf('S ::= "a" Missing\n')
        self.assertEqual(ctx.exception.name, "Missing")

    def test_empty_grammar(self):
        with self.assertRaises(EmptyGrammarError):
            parse_bnf("# nothing here\n")

    def test_fingerprint_is_stable_and_content_based(self):
        first = load_grammar(BINARY_GRAMMAR)
        second = load_grammar(BINARY_GRAMMAR)
        self.assertEqual(first.fingerprint(), second.fingerprint())
        self.assertEqual(parse_bnf(first.to_bnf()).fingerprint(), first.fingerprint())
        self.assertNotEqual(parse_bnf('S ::= "a"').fingerprint(), parse_bnf('S ::= "b"').fingerprint())

    def test_load_from_file(self):
        temp_dir = tempfile.mkdtemp()
        try:
            path = os.path.join(temp_dir, "g.bnf")
            with open(path, "w", encoding="utf-8") as f:
                f.write('root ::= "ab" | "a" root\n')
            grammar = load_grammar(path)
            self.assertTrue(accepts(grammar, "aab"))
        finally:
            shutil.rmtree(temp_dir)


class TestGrammarValidator(unittest.TestCase):
    """Test productive / reachable analysis."""

    def test_binary_grammar_is_clean(self):
        report = GrammarValidator().validate(load_grammar(BINARY_GRAMMAR))
        self.assertTrue(report.valid)
        self.assertEqual(report.warnings, [])
        self.assertEqual(report.summary["nonterminals"], 5)

    def test_unproductive_and_unreachable_are_warnings(self):
        grammar = parse_bnf('S ::= "a" | B\nB ::= "b" B\nU ::= "u"\n')
        report = GrammarValidator().validate(grammar)
        self.assertTrue(report.valid)
        self.assertEqual(report.summary["unproductive"], 1)
        self.assertTrue(any("'B' is unproductive" in w for w in report.warnings))
        self.assertTrue(any("'U' is unreachable" in w for w in report.warnings))

    def test_empty_language_is_an_error(self):
        report = GrammarValidator().validate(parse_bnf('S ::= S "a"\n'))
        self.assertFalse(report.valid)
        self.assertTrue(report.language_empty)


class TestRecognizer(unittest.TestCase):
    """Test the incremental recognizer on the binary grammar and small cases."""

    def setUp(self):
        self.grammar = load_grammar(BINARY_GRAMMAR)

    def test_initial_state_is_alive_not_complete(self):
        state = init_state(self.grammar)
        self.assertEqual(state.status, RecognizerStatus.ALIVE)
        self.assertFalse(state.is_complete)
        self.assertEqual(state.consumed, 0)

    def test_sentence_completes_after_five_characters(self):
        state = init_state(self.grammar)
        for i, ch in enumerate("10101"):
            state = advance(state, ch)
            self.assertTrue(state.is_alive)
            self.assertEqual(state.is_complete, i == 4)

    def test_dead_prefix_stays_dead(self):
        state = advance(advance(init_state(self.grammar), "0"), "1")
        self.assertTrue(state.is_dead)
        self.assertTrue(advance(state, "0").is_dead)

    def test_states_branch_without_interference(self):
        one = advance(init_state(self.grammar), "1")
        left = advance(one, "0")
        right = advance(one, "1")
        self.assertTrue(left.is_alive and right.is_alive)
        self.assertEqual(one.consumed, 1)
        self.assertTrue(advance(advance(advance(left, "1"), "1"), "0").is_complete)

    def test_multi_character_tokens(self):
        root = init_state(self.grammar)
        self.assertEqual(admissible(root, "1").status, RecognizerStatus.ALIVE)
        self.assertTrue(admissible(root, "00000").is_complete)
        self.assertTrue(admissible(admissible(root, "1101"), "11").is_dead)
        self.assertTrue(admissible(root, "2").is_dead)

    def test_empty_token_text_is_rejected(self):
        with self.assertRaises(TokenTextError):
            admissible(init_state(self.grammar), "")

    def test_advance_requires_one_character(self):
        with self.assertRaises(ValueError):
            advance(init_state(self.grammar), "01")

    def test_accepts_and_is_prefix(self):
        self.assertTrue(accepts(self.grammar, "10101"))
        self.assertTrue(accepts(self.grammar, "00000"))
        self.assertFalse(accepts(self.grammar, "0000"))
        self.assertTrue(is_prefix(self.grammar, "0000"))
        self.assertFalse(accepts(self.grammar, ""))
        self.assertTrue(is_prefix(self.grammar, ""))
        self.assertFalse(is_prefix(self.grammar, "000000"))

    def test_epsilon_and_nullable_nonterminals(self):
        grammar = parse_bnf('S ::= A B "c"\nA ::= "" | "a"\nB ::= "" | "b"\n')
        for sentence in ["c", "ac", "bc", "abc"]:
            self.assertTrue(accepts(grammar, sentence), sentence)
        self.assertFalse(accepts(grammar, "bac"))
        self.assertFalse(accepts(grammar, ""))

        epsilon = parse_bnf('S ::= "" | "a" S\n')
        self.assertTrue(accepts(epsilon, ""))
        self.assertTrue(init_state(epsilon).is_complete)
        self.assertTrue(accepts(epsilon, "aaa"))

    def test_left_recursion(self):
        grammar = parse_bnf('E ::= E "+" T | T\nT ::= "x" | "(" E ")"\n')
        self.assertTrue(accepts(grammar, "x+x+x"))
        self.assertTrue(accepts(grammar, "(x+x)+x"))
        self.assertTrue(is_prefix(grammar, "x+"))
        self.assertFalse(is_prefix(grammar, "x++"))

    def test_unproductive_rules_never_look_alive(self):
        grammar = parse_bnf('S ::= "a" | "b" B\nB ::= "b" B\n')
        self.assertFalse(is_prefix(grammar, "b"))
        self.assertTrue(accepts(grammar, "a"))

    def test_empty_language_initial_state_is_dead(self):
        grammar = parse_bnf('S ::= S "a"\n')
        self.assertTrue(init_state(grammar).is_dead)


class TestRecognizerAgainstEnumeration(unittest.TestCase):
    """
    accepts / is_prefix agree with derivation enumeration on every string of
    length <= 8 over each shipped grammar's alphabet (plus one foreign
    character). Subtrees below a non-prefix are skipped: the prefix set is
    prefix-closed and dead states stay dead.
    """

    MAX_LENGTH = 8
    LANGUAGE_BOUND = 128

    def check_grammar(self, path):
        grammar = load_grammar(path)
        language = enumerate_language(grammar, self.LANGUAGE_BOUND)
        # every shipped language is finite and fits the bound
        self.assertEqual(language, enumerate_language(grammar, 2 * self.LANGUAGE_BOUND))
        prefixes = enumerate_prefixes(language)
        alphabet = sorted(grammar.alphabet | {"\x07"})

        checked = 0
        stack = [("", init_state(grammar))]
        while stack:
            text, state = stack.pop()
            checked += 1
            self.assertEqual(state.is_complete, text in language, f"{path.name}: accepts({text!r})")
            self.assertEqual(state.is_alive, text in prefixes, f"{path.name}: is_prefix({text!r})")
            if not state.is_alive or len(text) == self.MAX_LENGTH:
                continue
            for ch in alphabet:
                stack.append((text + ch, advance(state, ch)))
        return checked

    def test_all_fixture_grammars(self):
        for path in ALL_GRAMMARS:
            with self.subTest(grammar=path.name):
                self.assertGreater(self.check_grammar(path), 1)

    def test_full_grid_on_binary_grammar(self):
        grammar = load_grammar(BINARY_GRAMMAR)
        language = enumerate_language(grammar, 16)
        prefixes = enumerate_prefixes(language)
        self.assertEqual(len(language), 17)
        for text in all_strings("01", self.MAX_LENGTH):
            self.assertEqual(accepts(grammar, text), text in language, text)
            self.assertEqual(is_prefix(grammar, text), text in prefixes, text)


if __name__ == '__main__':
    unittest.main()
