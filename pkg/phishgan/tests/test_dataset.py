from collections import Counter

import numpy as np
import pytest

from phishgan import url_examples
from phishgan.errors import DataError
from phishgan.urls.dataset import (
    UrlRecord,
    labels_of,
    load_csv,
    phishing_tells,
    stratified_kfold,
    synth_corpus,
    write_csv,
)
from phishgan.urls.labels import UrlLabel


def write(tmp_path, text):
    path = tmp_path / "urls.csv"
    path.write_text(text, encoding="utf-8")
    return path


def balanced(n_per_class):
    return [UrlRecord(f"http://b{i}.org", UrlLabel.BENIGN) for i in range(n_per_class)] + [
        UrlRecord(f"http://m{i}.org/login", UrlLabel.MALICIOUS) for i in range(n_per_class)
    ]


def test_load_two_rows(tmp_path):
    path = write(tmp_path, "url,label\nhttps://example.com,benign\nhttp://paypa1.com,malicious\n")

    records = load_csv(path)

    assert records == [
        UrlRecord("https://example.com", UrlLabel.BENIGN),
        UrlRecord("http://paypa1.com", UrlLabel.MALICIOUS),
    ]


@pytest.mark.parametrize(("token", "label"), [("Malicious", 1), ("BENIGN", 0), ("1", 1), ("0", 0)])
def test_labels_are_case_insensitive(tmp_path, token, label):
    records = load_csv(write(tmp_path, f"url,label\nhttp://x.org,{token}\n"))

    assert records[0].label == label


def test_unknown_label_names_its_line(tmp_path):
    path = write(tmp_path, "url,label\nhttp://x.org,spam\n")

    with pytest.raises(DataError, match="line 2") as excinfo:
        load_csv(path)

    assert excinfo.value.line == 2
    assert "spam" in str(excinfo.value)


def test_blank_lines_keep_line_numbers(tmp_path):
    path = write(tmp_path, "url,label\nhttp://a.org,benign\n\nhttp://b.org,spam\n")

    with pytest.raises(DataError, match="line 4") as excinfo:
        load_csv(path)

    assert excinfo.value.line == 4


def test_blank_lines_are_skipped(tmp_path):
    path = write(tmp_path, "url,label\n\nhttp://a.org,benign\n\nhttp://b.org,malicious\n\n")

    records = load_csv(path)

    assert [record.url for record in records] == ["http://a.org", "http://b.org"]


def test_empty_url_names_its_line(tmp_path):
    path = write(tmp_path, "url,label\nhttp://x.org,benign\n,malicious\n")

    with pytest.raises(DataError, match="line 3"):
        load_csv(path)


def test_wrong_header_rejected(tmp_path):
    with pytest.raises(DataError, match="header"):
        load_csv(write(tmp_path, "address,class\nhttp://x.org,benign\n"))


def test_missing_file_rejected(tmp_path):
    with pytest.raises(DataError, match="cannot read"):
        load_csv(tmp_path / "missing.csv")


def test_write_then_load(tmp_path):
    records = synth_corpus(20, seed=1) + [
        UrlRecord(" http://a.org/x y ", UrlLabel.MALICIOUS),
        UrlRecord("http://a.org/?x=1,2", UrlLabel.BENIGN),
    ]
    path = tmp_path / "out.csv"

    write_csv(records, path)
    loaded = load_csv(path)

    assert [r.label for r in loaded] == [r.label for r in records]
    assert [r.url for r in loaded[:-1]] == [r.url for r in records[:-1]]
    # commas are percent-encoded to keep two columns
    assert loaded[-1].url == "http://a.org/?x=1%2C2"


def test_bundled_sample_holds_both_classes():
    counts = Counter(record.label for record in url_examples.sample)

    assert counts[UrlLabel.BENIGN] > 0
    assert counts[UrlLabel.MALICIOUS] > 0


def test_kfold_on_ten_records():
    records = balanced(5)

    plan = stratified_kfold(records, k=5, seed=0)

    labels = labels_of(records)
    for fold in range(5):
        test = plan.test_indices(fold)
        assert sorted(labels[test].tolist()) == [0, 1]


def test_kfold_is_deterministic_per_seed():
    records = balanced(30)

    first = stratified_kfold(records, k=5, seed=42)
    second = stratified_kfold(records, k=5, seed=42)

    np.testing.assert_array_equal(first.assignments, second.assignments)


def test_folds_partition_the_records():
    records = synth_corpus(64, seed=2)

    plan = stratified_kfold(records, k=5, seed=9)

    seen = np.concatenate([plan.test_indices(fold) for fold in range(5)])
    assert sorted(seen.tolist()) == list(range(64))
    for fold in range(5):
        train = set(plan.train_indices(fold).tolist())
        assert train.isdisjoint(plan.test_indices(fold).tolist())
        assert len(train) + len(plan.test_indices(fold)) == 64
    assert max(plan.sizes()) - min(plan.sizes()) <= 1


def test_forty_thousand_url_folds():
    records = balanced(20_000)

    plan = stratified_kfold(records, k=5, seed=0)

    assert plan.sizes() == [8000] * 5
    labels = labels_of(records)
    for fold in range(5):
        assert labels[plan.test_indices(fold)].sum() == 4000


def test_class_smaller_than_fold_count_rejected():
    records = balanced(5)[:8]

    with pytest.raises(ValueError, match="fewer than 5 folds"):
        stratified_kfold(records, k=5)


def test_synthetic_corpus_is_balanced():
    records = synth_corpus(100, seed=7)

    counts = Counter(record.label for record in records)
    assert counts == {UrlLabel.BENIGN: 50, UrlLabel.MALICIOUS: 50}


def test_synthetic_labels_follow_the_planted_tells():
    for record in synth_corpus(400, seed=11):
        assert bool(phishing_tells(record.url)) == (record.label is UrlLabel.MALICIOUS)


def test_synthetic_corpus_depends_on_seed():
    first = Counter(record.url for record in synth_corpus(50, seed=1))
    second = Counter(record.url for record in synth_corpus(50, seed=2))

    assert first != second
    assert synth_corpus(50, seed=1) == synth_corpus(50, seed=1)


@pytest.mark.parametrize("n", [0, -4, 7])
def test_synthetic_corpus_size_checked(n):
    with pytest.raises(ValueError, match="corpus size"):
        synth_corpus(n)


@pytest.mark.parametrize(
    ("url", "tells"),
    [
        ("http://192.168.0.7/login", ["ip-host"]),
        ("https://docs.river.org@paypa1.com/verify", ["credential", "homoglyph"]),
        ("http://maple-login-verify-secure.net/", ["hyphens"]),
        ("https://www.garden.io/about", []),
        ("http://999.1.1.1/", []),
    ],
)
def test_phishing_tells(url, tells):
    assert phishing_tells(url) == tells
