import numpy as np
import pytest

from phishgan.errors import ShapeError
from phishgan.tests.cases import load_cases
from phishgan.urls.codec import (
    MAX_LENGTH,
    PAD,
    VOCABULARY_SIZE,
    build_vocabulary,
    decode_matrix,
    encode_url,
    encode_urls,
    one_hot,
)


def case_url(case):
    url = case["input"].get("url")
    if url is None:
        repeat = case["input"]["url_repeat"]
        url = repeat["text"] * repeat["times"]
    return url


def test_vocabulary_layout():
    vocab = build_vocabulary()

    assert len(vocab) == VOCABULARY_SIZE == 67
    assert vocab.index("a") == 0
    assert vocab.index("z") == 25
    assert vocab.index("0") == 26
    assert vocab.index("9") == 35
    assert vocab.index("-") == 36
    assert vocab.index("|") == 65
    assert vocab.index(PAD) == vocab.pad_index == 66
    assert len(set(vocab.symbols)) == 67


@pytest.mark.parametrize("case", load_cases("codec.yaml"))
def test_encode(case):
    url = case_url(case)
    output = case["output"]

    matrix = encode_url(url)
    indices = matrix.indices

    assert matrix.data.shape == (MAX_LENGTH, VOCABULARY_SIZE)
    if "prefix" in output:
        assert indices[: len(output["prefix"])].tolist() == output["prefix"]
    assert len(decode_matrix(matrix.data)) == output["used"]
    if "decoded" in output:
        assert decode_matrix(matrix.data) == output["decoded"]


def test_long_url_keeps_its_first_200_characters():
    url = "abcde" * 50

    assert decode_matrix(encode_url(url).data) == url[:200]


def test_every_row_has_exactly_one_hot_entry():
    matrix = encode_url("https://paypa1.com/login").data

    np.testing.assert_array_equal(matrix.sum(axis=1), np.ones(MAX_LENGTH))
    assert set(np.unique(matrix)) == {0.0, 1.0}
    # every row contributes one 1 out of 67 entries
    assert np.mean(matrix**2) == pytest.approx(1 / 67, abs=1e-15)


SYMBOL_POOL = (
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    "-._~:/?#[]@!$&'()*+,;=%\"<>^{}| \\\t"
    "éüßçñ\u0130\u03a9\u4e2d\u0434\U0001f41f\U0001f600\u200b"
)


def test_random_strings_encode_to_one_hot_rows():
    symbols = list(build_vocabulary().symbols)
    for seed in range(50):
        rng = np.random.default_rng(seed)
        url = "".join(rng.choice(list(SYMBOL_POOL), size=int(rng.integers(1, 300))))

        matrix = encode_url(url).data

        assert matrix.shape == (MAX_LENGTH, VOCABULARY_SIZE), seed
        np.testing.assert_array_equal(matrix.sum(axis=1), np.ones(MAX_LENGTH))
        assert np.mean(matrix**2) == pytest.approx(1 / 67, abs=1e-15), seed
        lowered = url.lower()[:MAX_LENGTH]
        expected = [symbols.index(c) if c in symbols else 66 for c in lowered]
        expected += [66] * (MAX_LENGTH - len(lowered))
        assert matrix.argmax(axis=1).tolist() == expected, seed


def test_unknown_characters_map_to_pad():
    matrix = encode_url("aé\U0001f41fb")

    assert matrix.indices[:4].tolist() == [0, 66, 66, 1]


def test_empty_url_rejected():
    with pytest.raises(ValueError, match="empty"):
        encode_url("")


def test_round_trip_on_synthetic_urls(corpus):
    for record in corpus:
        assert decode_matrix(encode_url(record.url).data) == record.url.lower()[:200]


def test_batch_encoding_matches_single_encoding():
    urls = ["https://a.org", "http://192.168.1.1/login"]

    matrices = one_hot(encode_urls(urls))

    assert matrices.shape == (2, MAX_LENGTH, VOCABULARY_SIZE)
    for url, matrix in zip(urls, matrices, strict=True):
        np.testing.assert_array_equal(matrix, encode_url(url).data)


def test_decoding_a_tie_picks_the_first_symbol():
    matrix = np.full((MAX_LENGTH, VOCABULARY_SIZE), 1 / VOCABULARY_SIZE)

    assert decode_matrix(matrix) == "a" * MAX_LENGTH


def test_decoding_real_valued_output(rng):
    target = encode_url("secure-login.example.com").data
    noisy = np.clip(0.6 * target + rng.uniform(0, 0.3, size=target.shape), 0, 1)

    assert decode_matrix(noisy) == "secure-login.example.com"


def test_decode_rejects_wrong_shape():
    with pytest.raises(ShapeError):
        decode_matrix(np.zeros((67, 200)))
