"""Labelled URL datasets: CSV files, cross-validation folds and a synthetic corpus.

Files are UTF-8 CSV with a `url,label` header. Commas inside URLs are written
percent-encoded, so every data line holds exactly one separator.
"""

from __future__ import annotations

from collections.abc import Sequence

import csv
import dataclasses
import ipaddress
import logging
import os
import re
import urllib.parse

import numpy as np
import pandas as pd
from sklearn.model_selection import StratifiedKFold

from phishgan.errors import DataError
from phishgan.urls.labels import UrlLabel

log = logging.getLogger(__name__)

HEADER = ("url", "label")


@dataclasses.dataclass(frozen=True)
class UrlRecord:
    url: str
    label: UrlLabel

    def __post_init__(self):
        if not self.url:
            msg = "a URL record needs a non-empty URL"
            raise ValueError(msg)


def labels_of(records: Sequence[UrlRecord]) -> np.ndarray:
    return np.array([int(record.label) for record in records], dtype=np.int64)


def load_csv(path: str | os.PathLike) -> list[UrlRecord]:
    """Read a `url,label` CSV file.

    Labels are `benign`/`0` or `malicious`/`1`, case-insensitively.

    Raises:
        DataError: If the file cannot be read, has another header, or a row
            has an empty URL or an unknown label (the error names its line).
    """
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            encoding="utf-8",
            quoting=csv.QUOTE_NONE,
            keep_default_na=False,
            na_filter=False,
            skip_blank_lines=False,
        )
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as error:
        msg = f"cannot read {os.fspath(path)}: {error}"
        raise DataError(msg) from error
    except pd.errors.EmptyDataError as error:
        msg = f"{os.fspath(path)} is empty"
        raise DataError(msg) from error

    if tuple(column.strip().lower() for column in frame.columns) != HEADER:
        msg = f"expected header 'url,label', got {','.join(frame.columns)!r}"
        raise DataError(msg, line=1)

    records = []
    # Blank lines stay in the frame so that row i is physical line i + 2.
    for row, fields in enumerate(frame.itertuples(index=False, name=None)):
        url, token = (field if isinstance(field, str) else "" for field in fields)
        if not url.strip() and not token.strip():
            continue
        line = row + 2
        try:
            if not url.strip():
                msg = "a URL record needs a non-empty URL"
                raise ValueError(msg)
            records.append(UrlRecord(url, UrlLabel.parse(token)))
        except ValueError as error:
            raise DataError(str(error), line=line) from error
    log.info("Loaded %d URLs from %s", len(records), os.fspath(path))
    return records


def _escape(url: str) -> str:
    return url.replace(",", "%2C").replace("\r", "%0D").replace("\n", "%0A")


def write_csv(records: Sequence[UrlRecord], path: str | os.PathLike) -> None:
    """Write records as a `url,label` CSV file with `benign`/`malicious` labels."""
    lines = [",".join(HEADER)]
    lines.extend(f"{_escape(record.url)},{record.label.token}" for record in records)
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        file.write("\n".join(lines) + "\n")


@dataclasses.dataclass(frozen=True)
class FoldPlan:
    """Assignment of every record index to one of `k` folds."""

    k: int
    assignments: np.ndarray
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def sizes(self) -> list[int]:
        return np.bincount(self.assignments, minlength=self.k).tolist()


def stratified_kfold(records: Sequence[UrlRecord], k: int = 5, seed: int = 0) -> FoldPlan:
    """Split records into `k` folds preserving the class balance.

    Fold sizes differ by at most one, and so do the per-class counts.

    Raises:
        ValueError: If `k < 2` or a class has fewer than `k` members.
    """
    if k < 2:
        msg = f"need at least 2 folds, got {k}"
        raise ValueError(msg)
    labels = labels_of(records)
    for label in UrlLabel:
        count = int((labels == label).sum())
        if count < k:
            msg = f"class {label.token} has {count} records, fewer than {k} folds"
            raise ValueError(msg)

    splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed % 2**32)
    assignments = np.empty(len(labels), dtype=np.int64)
    for fold, (_, test) in enumerate(splitter.split(np.zeros(len(labels)), labels)):
        assignments[test] = fold
    return FoldPlan(k=k, assignments=assignments, seed=seed)


# Synthetic corpus. Benign URLs are drawn from a clean token pool; malicious
# URLs use the same grammar plus at least one planted tell, so the label can
# always be recomputed with `phishing_tells`.

_SCHEMES = ("http://", "https://")
_SUBDOMAINS = ("www", "mail", "docs", "shop", "blog", "news", "app", "support")
_WORDS = (
    "river", "garden", "market", "studio", "cloud", "harbor", "maple", "orbit",
    "summit", "pixel", "forest", "lantern", "meadow", "canyon", "atlas", "coral",
    "beacon", "willow", "falcon", "cedar", "nova", "quartz", "ember", "tundra",
)
_TLDS = ("com", "org", "net", "io", "edu", "co", "info", "dev")
_PATH_WORDS = (
    "about", "contact", "blog", "products", "news", "help", "search", "team",
    "careers", "docs", "pricing", "events", "gallery", "faq", "press",
)
_BAIT_WORDS = (
    "login", "verify", "account", "secure", "update", "signin", "billing",
    "confirm", "wallet", "unlock",
)
HOMOGLYPH_TOKENS = (
    "paypa1", "g00gle", "app1e", "amaz0n", "micros0ft", "faceb00k",
    "netf1ix", "1nstagram", "linkedln", "rnicrosoft",
)
_TELLS = ("credential", "ip-host", "homoglyph", "hyphens")

_IP_HOST = re.compile(r"^\d{1,3}(\.\d{1,3}){3}$")


def _host(url: str) -> str:
    netloc = urllib.parse.urlsplit(url).netloc
    return netloc.rsplit("@", 1)[-1].split(":", 1)[0]


def phishing_tells(url: str) -> list[str]:
    """The planted tells `url` carries; empty for a benign synthetic URL.

    Examples:
        >>> phishing_tells("http://192.168.0.7/login")
        ['ip-host']
    """
    tells = []
    lowered = url.lower()
    host = _host(lowered)
    if "@" in lowered:
        tells.append("credential")
    if _IP_HOST.match(host):
        try:
            ipaddress.ip_address(host)
            tells.append("ip-host")
        except ValueError:
            pass
    if any(token in lowered for token in HOMOGLYPH_TOKENS):
        tells.append("homoglyph")
    if host.count("-") >= 3:
        tells.append("hyphens")
    return tells


def _choice(rng: np.random.Generator, pool: Sequence[str]) -> str:
    return pool[int(rng.integers(len(pool)))]


def _clean_domain(rng: np.random.Generator) -> str:
    name = _choice(rng, _WORDS)
    if rng.random() < 0.3:
        name = f"{name}-{_choice(rng, _WORDS)}"
    domain = f"{name}.{_choice(rng, _TLDS)}"
    if rng.random() < 0.5:
        domain = f"{_choice(rng, _SUBDOMAINS)}.{domain}"
    return domain


def _path(rng: np.random.Generator, words: Sequence[str]) -> str:
    depth = int(rng.integers(0, 4))
    return "".join(f"/{_choice(rng, words)}" for _ in range(depth))


def _benign_url(rng: np.random.Generator) -> str:
    url = _choice(rng, _SCHEMES) + _clean_domain(rng) + _path(rng, _PATH_WORDS)
    if rng.random() < 0.2:
        url += f"?q={_choice(rng, _WORDS)}"
    return url


def _malicious_url(rng: np.random.Generator) -> str:
    tell = _choice(rng, _TELLS)
    scheme = _choice(rng, _SCHEMES)
    path = _path(rng, _PATH_WORDS + _BAIT_WORDS) or f"/{_choice(rng, _BAIT_WORDS)}"
    if tell == "credential":
        host = f"{_clean_domain(rng)}@{_clean_domain(rng)}"
    elif tell == "ip-host":
        host = ".".join(str(int(octet)) for octet in rng.integers(1, 255, size=4))
    elif tell == "homoglyph":
        host = f"{_choice(rng, HOMOGLYPH_TOKENS)}.{_choice(rng, _TLDS)}"
        if rng.random() < 0.5:
            host = f"{_choice(rng, _SUBDOMAINS)}.{host}"
    else:
        words = [_choice(rng, _BAIT_WORDS) for _ in range(int(rng.integers(3, 5)))]
        host = "-".join([_choice(rng, _WORDS), *words]) + f".{_choice(rng, _TLDS)}"
    return scheme + host + path


def synth_corpus(n: int, seed: int = 0) -> list[UrlRecord]:
    """A shuffled, balanced synthetic corpus of `n` labelled URLs.

    Raises:
        ValueError: If `n` is not positive or not even.
    """
    if n <= 0:
        msg = f"corpus size must be positive, got {n}"
        raise ValueError(msg)
    if n % 2:
        msg = f"corpus size must be even for a 50/50 split, got {n}"
        raise ValueError(msg)

    rng = np.random.default_rng(seed)
    records = []
    while len(records) < n // 2:
        url = _benign_url(rng)
        if not phishing_tells(url):
            records.append(UrlRecord(url, UrlLabel.BENIGN))
    while len(records) < n:
        url = _malicious_url(rng)
        if phishing_tells(url):
            records.append(UrlRecord(url, UrlLabel.MALICIOUS))
    return [records[i] for i in rng.permutation(n)]
