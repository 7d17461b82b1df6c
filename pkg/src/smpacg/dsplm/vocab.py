"""Character-level vocabulary with fixed special token ids."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field


class VocabError(ValueError):
    pass


PAD, BOS, EOS, SEP, MASK = 0, 1, 2, 3, 4
SPECIAL_TOKENS = ("<pad>", "<bos>", "<eos>", "<sep>", "<mask>")


@dataclass
class Vocab:
    tokens: list[str]  # index == id; first five are the specials
    _ids: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        if self.tokens[:5] != list(SPECIAL_TOKENS):
            raise VocabError("first five vocab entries must be the special tokens")
        self._ids = {t: i for i, t in enumerate(self.tokens)}
        if len(self._ids) != len(self.tokens):
            raise VocabError("vocab tokens must be unique")

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    def id(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise VocabError(f"token {token!r} not in vocabulary") from None

    def encode(self, text: str) -> list[int]:
        return [self.id(ch) for ch in text]

    def decode(self, ids: list[int]) -> str:
        out = []
        for i in ids:
            if not 0 <= i < len(self.tokens):
                raise VocabError(f"id {i} out of range")
            if i < 5:
                continue
            out.append(self.tokens[i])
        return "".join(out)


def build_vocab(corpus: list[str], max_size: int | None = None) -> Vocab:
    """Character vocabulary ordered by frequency (desc) then codepoint."""
    if not corpus:
        raise VocabError("empty corpus")
    counts = Counter(ch for text in corpus for ch in text)
    ordered = sorted(counts, key=lambda ch: (-counts[ch], ch))
    if max_size is not None:
        ordered = ordered[: max(0, max_size - len(SPECIAL_TOKENS))]
    return Vocab(list(SPECIAL_TOKENS) + ordered)
