"""Word and character segmentation shared by every metric."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable

# ASCII punctuation and symbols split off by the 13a convention.
_PUNCT = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
# Padding every separator up front and rejoining afterwards is equivalent to
# splitting "." and "," only where a non-digit neighbours them, since padding
# inserts nothing but spaces.
_PAD = str.maketrans(
    {c: f" {c} " for c in map(chr, range(128)) if c in ".," or (c != " " and _PUNCT.match(c))}
)
_DIGIT_SEPARATOR = re.compile(r"([0-9]) ([\.,]) (?=[0-9])")
_DASH_AFTER_DIGIT = re.compile(r"([0-9])(-)")


class UnsupportedTokenizerError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class TokenizedSegment:
    tokens: tuple[str, ...]
    source_len_chars: int

    def __len__(self) -> int:
        return len(self.tokens)


def _normalize_13a(text: str) -> str:
    text = text.replace("<skipped>", "")
    text = text.replace("-\n", "")
    text = text.replace("\n", " ")
    text = text.replace("&quot;", '"')
    text = text.replace("&amp;", "&")
    text = text.replace("&lt;", "<")
    text = text.replace("&gt;", ">")

    text = text.translate(_PAD)
    text = _DIGIT_SEPARATOR.sub(r"\1\2", text)
    if "-" in text:
        text = _DASH_AFTER_DIGIT.sub(r"\1 \2 ", text)
    return text


def tokenize_13a(seg: str) -> TokenizedSegment:
    """Tokenize one segment with mteval-v13a style punctuation splitting.

    >>> tokenize_13a("Hello, world!").tokens
    ('Hello', ',', 'world', '!')
    >>> tokenize_13a("1,000 km").tokens
    ('1,000', 'km')
    """
    return TokenizedSegment(tuple(_normalize_13a(seg).split()), len(seg))


def tokenize_none(seg: str) -> TokenizedSegment:
    return TokenizedSegment(tuple(seg.split()), len(seg))


TOKENIZERS: dict[str, Callable[[str], TokenizedSegment]] = {
    "13a": tokenize_13a,
    "none": tokenize_none,
}
DEFAULT_TOKENIZER = "13a"


def get_tokenizer(name: str) -> Callable[[str], TokenizedSegment]:
    try:
        return TOKENIZERS[name]
    except KeyError:
        raise UnsupportedTokenizerError(
            f"unsupported tokenizer: {name!r} (choose from {', '.join(TOKENIZERS)})"
        ) from None


def remove_whitespace(seg: str) -> str:
    return "".join(seg.split())


def char_ngrams(seg: str, n: int, remove_space: bool = True) -> Counter[str]:
    """Multiset of all contiguous length-``n`` character windows of ``seg``."""
    if not 1 <= n <= 6:
        raise ValueError(f"character n-gram order must be in 1..6, got {n}")
    if remove_space:
        seg = remove_whitespace(seg)
    return Counter(seg[i : i + n] for i in range(len(seg) - n + 1))
