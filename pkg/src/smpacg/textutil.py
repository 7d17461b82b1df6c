"""Shared text normalization and tokenization helpers.

Chinese text is handled at character granularity (no tokenizer dependency);
runs of Latin letters / digits are kept together and matched as words.
"""

from __future__ import annotations

import re
import unicodedata

_CJK_RANGES = (
    (0x4E00, 0x9FFF),
    (0x3400, 0x4DBF),
    (0xF900, 0xFAFF),
)

_WORD_RE = re.compile(r"[A-Za-z0-9]+|\S")


def is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def normalize(text: str) -> str:
    """Lowercase, drop punctuation, collapse whitespace."""
    out = []
    for ch in text:
        if _is_punct(ch):
            continue
        if ch.isspace():
            out.append(" ")
        else:
            out.append(ch.lower())
    return re.sub(r" +", " ", "".join(out)).strip()


def tokenize(text: str) -> list[str]:
    """Split into tokens: one token per CJK character, word-level elsewhere."""
    tokens: list[str] = []
    buf: list[str] = []

    def flush():
        if buf:
            tokens.extend(_WORD_RE.findall("".join(buf)))
            buf.clear()

    for ch in text:
        if is_cjk(ch):
            flush()
            tokens.append(ch)
        elif ch.isspace():
            flush()
        else:
            buf.append(ch)
    flush()
    return tokens


def char_ngrams(text: str, n_min: int = 1, n_max: int = 3) -> list[str]:
    """All character n-grams of the normalized text, sizes n_min..n_max."""
    s = normalize(text).replace(" ", "␣")
    grams = []
    for n in range(n_min, n_max + 1):
        grams.extend(s[i : i + n] for i in range(len(s) - n + 1))
    return grams
