import json
from collections import Counter
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from macroeval.tokenizers import (
    UnsupportedTokenizerError,
    char_ngrams,
    get_tokenizer,
    tokenize_13a,
    tokenize_none,
)

GOLDEN = [
    json.loads(line)
    for line in (Path(__file__).parent / "data" / "tok13a_golden.jsonl").read_text("utf-8").splitlines()
]

# Text drawn heavily from the characters the 13a rules care about.
rule_text = st.text(
    alphabet=st.sampled_from(list("ab9 0.,-&;<>\"'$%()!?/:xyzqué \t")) | st.characters(),
    max_size=40,
).map(lambda s: s.replace("\n", " "))


@pytest.mark.parametrize("case", GOLDEN, ids=[c["note"] for c in GOLDEN])
def test_golden(case):
    assert list(tokenize_13a(case["input"]).tokens) == case["tokens"]


def test_golden_file_size():
    assert len(GOLDEN) >= 20


@pytest.mark.parametrize(
    "text, expected",
    [
        ("Hello, world!", ["Hello", ",", "world", "!"]),
        ("", []),
        ("1,000 km", ["1,000", "km"]),
    ],
)
def test_13a_examples(text, expected):
    assert list(tokenize_13a(text).tokens) == expected


def test_source_length_recorded():
    assert tokenize_13a("Hello, world!").source_len_chars == 13


@pytest.mark.parametrize(
    "text, expected",
    [("a  b", ["a", "b"]), ("Hello, world!", ["Hello,", "world!"]), ("", [])],
)
def test_none_tokenizer(text, expected):
    assert list(tokenize_none(text).tokens) == expected


def test_unknown_tokenizer_rejected():
    with pytest.raises(UnsupportedTokenizerError, match="unsupported tokenizer"):
        get_tokenizer("zh")


@pytest.mark.parametrize(
    "seg, n, expected",
    [("abc", 2, {"ab": 1, "bc": 1}), ("a b", 2, {"ab": 1}), ("aaa", 1, {"a": 3}), ("ab", 3, {})],
)
def test_char_ngrams(seg, n, expected):
    assert char_ngrams(seg, n) == Counter(expected)


def test_char_ngrams_keep_space():
    assert char_ngrams("a b", 2, remove_space=False) == Counter({"a ": 1, " b": 1})


def test_char_ngram_order_bounds():
    with pytest.raises(ValueError):
        char_ngrams("abc", 7)


@given(rule_text)
def test_13a_idempotent(s):
    once = tokenize_13a(s).tokens
    assert tokenize_13a(" ".join(once)).tokens == once


@given(rule_text)
def test_13a_tokens_have_no_whitespace(s):
    assert all(tok and not any(ch.isspace() for ch in tok) for tok in tokenize_13a(s).tokens)


@given(rule_text)
def test_13a_token_conservation(s):
    unescaped = (
        s.replace("<skipped>", "")
        .replace("&quot;", '"')
        .replace("&amp;", "&")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
    )
    assert "".join(tokenize_13a(s).tokens) == "".join(unescaped.split())


@given(st.text(max_size=30), st.integers(1, 6))
def test_char_ngram_multiset_size(s, n):
    stripped = "".join(s.split())
    assert sum(char_ngrams(s, n).values()) == max(0, len(stripped) - n + 1)


@pytest.mark.parametrize(
    "case", [c for c in GOLDEN if "reference_tokens" not in c], ids=lambda c: c["note"]
)
def test_golden_agrees_with_reference_scorer(case):
    tok = pytest.importorskip("sacrebleu.tokenizers.tokenizer_13a")
    assert tok.Tokenizer13a()(case["input"]).split() == case["tokens"]


@pytest.mark.parametrize("case", [c for c in GOLDEN if "reference_tokens" in c], ids=lambda c: c["note"])
def test_known_divergence_from_reference_regex(case):
    # The reference regex consumes the left neighbour of a separator, so a
    # second separator in a row is never split from a following digit.
    tok = pytest.importorskip("sacrebleu.tokenizers.tokenizer_13a")
    assert tok.Tokenizer13a()(case["input"]).split() == case["reference_tokens"]
    assert case["tokens"] != case["reference_tokens"]
