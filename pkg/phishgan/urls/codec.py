"""One-hot encoding of URLs as 200x67 character matrices.

Every URL is lowercased, cut at 200 characters and padded with a dedicated PAD
symbol. Each of the 200 rows holds exactly one 1, PAD rows included, so the
mean of the squared entries of any encoded URL is exactly 1/67.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import dataclasses
import functools
import string

import numpy as np

from phishgan.errors import ShapeError
from phishgan.urls.labels import UrlLabel

MAX_LENGTH = 200
VOCABULARY_SIZE = 67

# Pseudo-character filling the positions past the end of a URL.
PAD = "\x00"
# Rendered in place of a PAD that is followed by real characters.
PAD_PLACEHOLDER = "�"

SPECIAL_CHARACTERS = "-._~:/?#[]@!$&'()*+,;=%\"<>^{}|"


@dataclasses.dataclass(frozen=True)
class Vocabulary:
    symbols: tuple[str, ...]
    index_of: dict[str, int]

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def pad_index(self) -> int:
        return self.index_of[PAD]

    def index(self, character: str) -> int:
        """Index of `character`; anything outside the vocabulary maps to PAD."""
        return self.index_of.get(character, self.pad_index)


@dataclasses.dataclass(frozen=True)
class UrlMatrix:
    """A URL as a (200, 67) one-hot matrix, rows are positions."""

    data: np.ndarray
    label: UrlLabel | None = None

    @property
    def indices(self) -> np.ndarray:
        return self.data.argmax(axis=1)


@functools.cache
def build_vocabulary() -> Vocabulary:
    """The fixed 67-symbol dictionary.

    Indices 0-25 are a-z, 26-35 are 0-9, 36-65 are the special characters in
    `SPECIAL_CHARACTERS` order and 66 is PAD.
    """
    symbols = (
        tuple(string.ascii_lowercase)
        + tuple(string.digits)
        + tuple(SPECIAL_CHARACTERS)
        + (PAD,)
    )
    if len(symbols) != VOCABULARY_SIZE or len(set(symbols)) != VOCABULARY_SIZE:
        msg = f"vocabulary must hold {VOCABULARY_SIZE} distinct symbols, got {len(symbols)}"
        raise RuntimeError(msg)
    return Vocabulary(symbols, {symbol: i for i, symbol in enumerate(symbols)})


def url_to_indices(url: str, vocab: Vocabulary | None = None) -> np.ndarray:
    """Symbol index of every one of the 200 positions of `url`.

    Raises:
        ValueError: If `url` is empty.
    """
    if not url:
        msg = "cannot encode an empty URL"
        raise ValueError(msg)
    vocab = vocab or build_vocabulary()
    indices = np.full(MAX_LENGTH, vocab.pad_index, dtype=np.int64)
    for position, character in enumerate(url.lower()[:MAX_LENGTH]):
        indices[position] = vocab.index(character)
    return indices


def one_hot(indices: np.ndarray) -> np.ndarray:
    """(..., 200) symbol indices to (..., 200, 67) one-hot float64 matrices."""
    return np.eye(VOCABULARY_SIZE)[indices]


def encode_url(
    url: str, vocab: Vocabulary | None = None, label: UrlLabel | None = None
) -> UrlMatrix:
    """Encode `url` as a one-hot matrix.

    Examples:
        >>> matrix = encode_url("ab")
        >>> matrix.indices[:3].tolist()
        [0, 1, 66]
    """
    return UrlMatrix(one_hot(url_to_indices(url, vocab)), label)


def encode_urls(urls: Iterable[str], vocab: Vocabulary | None = None) -> np.ndarray:
    """Encode several URLs as a (n, 200) index array."""
    vocab = vocab or build_vocabulary()
    return np.stack([url_to_indices(url, vocab) for url in urls])


def decode_matrix(matrix: np.ndarray, vocab: Vocabulary | None = None) -> str:
    """Read a (200, 67) matrix back as a string.

    Each row becomes its highest-scoring symbol (the lowest index on ties),
    trailing PADs are dropped and interior PADs show as `PAD_PLACEHOLDER`.
    Real-valued generator output decodes the same way.

    Raises:
        ShapeError: If `matrix` is not (200, 67).
    """
    vocab = vocab or build_vocabulary()
    matrix = np.asarray(matrix)
    if matrix.shape != (MAX_LENGTH, len(vocab)):
        raise ShapeError("decode_matrix", (MAX_LENGTH, len(vocab)), matrix.shape)
    return decode_indices(matrix.argmax(axis=1), vocab)


def decode_indices(indices: Sequence[int], vocab: Vocabulary | None = None) -> str:
    vocab = vocab or build_vocabulary()
    text = "".join(vocab.symbols[i] for i in indices).rstrip(PAD)
    return text.replace(PAD, PAD_PLACEHOLDER)
