"""Matrix Market and vocabulary file I/O.

Sparse matrices use coordinate format, dense factors use array format.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import DimensionMismatch


def write_sparse(A, path) -> None:
    """Write a sparse matrix in coordinate real general format."""
    scipy.io.mmwrite(str(path), sp.coo_array(A))


def read_sparse(path) -> sp.csc_array:
    """Read a sparse matrix, returned as CSC with sorted indices."""
    A = sp.csc_array(scipy.io.mmread(str(path)))
    A.sort_indices()
    A.eliminate_zeros()
    return A


def write_dense(M: np.ndarray, path) -> None:
    """Write a dense matrix in array format."""
    scipy.io.mmwrite(str(path), np.asarray(M, dtype=float))


def read_dense(path) -> np.ndarray:
    """Read an array-format dense matrix."""
    M = scipy.io.mmread(str(path))
    if sp.issparse(M):
        M = M.todense()
    return np.asarray(M, dtype=float)


def write_vocab(path, terms: list[str], doc_freq: list[int]) -> None:
    """Write vocab.tsv rows: index<TAB>term<TAB>df."""
    if len(terms) != len(doc_freq):
        raise DimensionMismatch("terms and doc_freq lengths differ")
    with open(path, "w", encoding="utf-8") as fh:
        for i, (term, df) in enumerate(zip(terms, doc_freq)):
            fh.write(f"{i}\t{term}\t{df}\n")


def read_vocab(path) -> tuple[list[str], list[int]]:
    """Read vocab.tsv back into (terms, doc_freq), ordered by index."""
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        idx, term, df = line.split("\t")
        rows.append((int(idx), term, int(df)))
    rows.sort()
    return [r[1] for r in rows], [r[2] for r in rows]
