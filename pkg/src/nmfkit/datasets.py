"""Best-effort fetchers for the classic text collections.

These are a convenience only; nothing in the test suite depends on network
access. Source URLs are recorded as published and availability is not
guaranteed.
"""

from __future__ import annotations

import hashlib
import re
import tarfile
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .corpus import build_matrix_from_texts
from .errors import ChecksumMismatch, NetworkError
from .mmio import write_sparse


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    url: str
    sha256: str | None  # verified when recorded


DATASETS = {
    "medlars": DatasetSpec(
        name="medlars",
        url="http://www.cs.utk.edu/~lsi/corpa/med.tar.gz",
        sha256=None,
    ),
    "cisi": DatasetSpec(
        name="cisi",
        url="http://www.cs.utk.edu/~lsi/corpa/cisi.tar.gz",
        sha256=None,
    ),
    "reuters10": DatasetSpec(
        name="reuters10",
        url="http://www.daviddlewis.com/resources/testcollections/reuters21578/reuters21578.tar.gz",
        sha256=None,
    ),
}


def _download(url: str, dest: Path) -> None:
    try:
        with urllib.request.urlopen(url, timeout=60) as resp:
            dest.write_bytes(resp.read())
    except (urllib.error.URLError, OSError) as exc:
        raise NetworkError(f"failed to download {url}: {exc}") from exc


def _verify(path: Path, sha256: str | None) -> None:
    if sha256 is None:
        return
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    if digest != sha256:
        raise ChecksumMismatch(f"{path.name}: expected {sha256}, got {digest}")


def parse_smart_docs(text: str) -> list[str]:
    """Parse the SMART collection format (.I / .W markers) into documents."""
    docs = []
    current: list[str] | None = None
    in_body = False
    for line in text.splitlines():
        if line.startswith(".I"):
            if current is not None:
                docs.append(" ".join(current))
            current = []
            in_body = False
        elif line.startswith(".W"):
            in_body = True
        elif line.startswith("."):
            in_body = False
        elif in_body and current is not None:
            current.append(line.strip())
    if current is not None:
        docs.append(" ".join(current))
    return [d for d in docs if d.strip()]


_REUTERS_DOC_RE = re.compile(r"<REUTERS[^>]*>(.*?)</REUTERS>", re.DOTALL)
_TOPICS_RE = re.compile(r"<TOPICS>(.*?)</TOPICS>", re.DOTALL)
_D_RE = re.compile(r"<D>(.*?)</D>")
_BODY_RE = re.compile(r"<BODY>(.*?)</BODY>", re.DOTALL)
_SPLIT_RE = re.compile(r'LEWISSPLIT="TRAIN"')


def parse_reuters_top10(sgml_texts: list[str]) -> list[str]:
    """ModApte training documents restricted to the ten most frequent categories.

    Best-effort reproduction of the published subset via category filtering.
    """
    records = []
    for text in sgml_texts:
        for match in _REUTERS_DOC_RE.finditer(text):
            doc = match.group(0)
            if not _SPLIT_RE.search(doc):
                continue
            topics_m = _TOPICS_RE.search(doc)
            body_m = _BODY_RE.search(doc)
            if not topics_m or not body_m:
                continue
            cats = _D_RE.findall(topics_m.group(1))
            if cats:
                records.append((cats, body_m.group(1)))
    counts: dict[str, int] = {}
    for cats, _ in records:
        for c in cats:
            counts[c] = counts.get(c, 0) + 1
    top10 = {c for c, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:10]}
    return [body for cats, body in records if any(c in top10 for c in cats)]


def fetch(name: str, dest_dir, weighting: str = "tfidf", min_df: int = 2) -> tuple[Path, Path]:
    """Download, parse, and convert a dataset to matrix.mtx + vocab.tsv.

    Idempotent: when the outputs already exist under dest_dir the fetch is
    skipped (cache hit).
    """
    if name not in DATASETS:
        raise ValueError(f"unknown dataset {name!r}; choose from {sorted(DATASETS)}")
    spec = DATASETS[name]
    dest_dir = Path(dest_dir)
    dest_dir.mkdir(parents=True, exist_ok=True)
    matrix_path = dest_dir / "matrix.mtx"
    vocab_path = dest_dir / "vocab.tsv"
    if matrix_path.exists() and vocab_path.exists():
        return matrix_path, vocab_path

    archive = dest_dir / Path(spec.url).name
    if not archive.exists():
        _download(spec.url, archive)
    _verify(archive, spec.sha256)

    texts: list[str] = []
    with tarfile.open(archive) as tar:
        for member in tar.getmembers():
            if not member.isfile():
                continue
            raw = tar.extractfile(member).read().decode("latin-1")
            if name == "reuters10":
                if member.name.endswith(".sgm"):
                    texts.append(raw)
            else:
                texts.extend(parse_smart_docs(raw))
    if name == "reuters10":
        texts = parse_reuters_top10(texts)

    A, vocab = build_matrix_from_texts(texts, weighting=weighting, min_df=min_df)
    write_sparse(A, matrix_path)
    vocab.save(vocab_path)
    return matrix_path, vocab_path
