"""Bundled-data integrity: the committed files must match their generator."""

import hashlib
from importlib import resources

EXPECTED = {
    "corpus.txt":
        "37e6b88e07e316541c953d7e3e32bbaae49f5d0232283562cf84fc409d010a6e",
    "corpus_vectors.txt":
        "ccaab7e9561f03098eae9d421714d5a3a587f4c900d1fa0bede5853ad5e2fdef",
}


def test_bundled_files_unchanged():
    data = resources.files("semrheo") / "data"
    for name, expected in EXPECTED.items():
        digest = hashlib.sha256((data / name).read_bytes()).hexdigest()
        assert digest == expected, (
            f"{name} drifted from tools/make_corpus.py output; regenerate "
            "and update this hash deliberately")


def test_corpus_is_line_per_sentence():
    data = resources.files("semrheo") / "data"
    lines = (data / "corpus.txt").read_text(encoding="utf-8").splitlines()
    assert len(lines) >= 3000
    assert all(line and line[0].isupper() and line.endswith(".")
               for line in lines)
