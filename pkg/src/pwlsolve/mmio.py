"""Matrix Market exchange and problem-bundle manifests.

A bundle is a directory holding ``T.mtx`` (coordinate form for sparse,
array form for dense; 1-based indices, symmetric storage honored on
read), ``b.mtx`` and a ``manifest.json`` naming both files, the storage
kind and, when the instance came from a generator, its full recipe.
Vectors may alternatively be newline-separated decimal text.
"""

from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from .core import PwlsProblem
from .errors import DimensionMismatchError
from .generators import GenSpec
from .linalg import DenseMatrix, Matrix, PentaBandMatrix, SparseMatrix

MANIFEST_NAME = "manifest.json"


def write_matrix(path, M: Matrix) -> None:
    path = Path(path)
    if isinstance(M, DenseMatrix):
        scipy.io.mmwrite(str(path), M.a, precision=17)
    elif isinstance(M, SparseMatrix):
        scipy.io.mmwrite(str(path), M.to_scipy().tocoo(), precision=17)
    elif isinstance(M, PentaBandMatrix):
        scipy.io.mmwrite(str(path), M.to_scipy().tocoo(), precision=17, symmetry="symmetric")
    else:
        raise TypeError(f"unsupported matrix type {type(M).__name__}")


def read_matrix(path) -> DenseMatrix | SparseMatrix:
    """Array-format files come back dense, coordinate files as CSR."""
    m = scipy.io.mmread(str(path))
    if isinstance(m, np.ndarray):
        return DenseMatrix(m)
    return SparseMatrix.from_scipy(m.tocsr())


def penta_from_sparse(M: SparseMatrix, grid_side: int) -> PentaBandMatrix:
    """Rebuild banded storage from a CSR matrix with the five-band profile."""
    m = grid_side
    n = m * m
    if M.shape != (n, n):
        raise DimensionMismatchError(f"expected order {n} for grid side {m}, got {M.shape}")
    s = M.to_scipy()
    dia = s.todia()
    bands = {int(k): i for i, k in enumerate(dia.offsets)}
    extra = set(bands) - {0, 1, -1, m, -m}
    if any(dia.data[bands[k]].any() for k in extra):
        raise ValueError("matrix has entries outside the five-band profile")

    def band(k, length, start):
        if k not in bands:
            return np.zeros(length)
        return dia.data[bands[k]][start : start + length]

    diag = band(0, n, 0)
    off1_u, off1_l = band(1, n - 1, 1), band(-1, n - 1, 0)
    offm_u, offm_l = band(m, n - m, m), band(-m, n - m, 0)
    if not (np.array_equal(off1_u, off1_l) and np.array_equal(offm_u, offm_l)):
        raise ValueError("matrix is not symmetric within the band profile")
    return PentaBandMatrix(m, diag, off1_u, offm_u)


def write_vector(path, v: np.ndarray) -> None:
    scipy.io.mmwrite(str(path), np.asarray(v, dtype=np.float64).reshape(-1, 1), precision=17)


def read_vector(path) -> np.ndarray:
    """Matrix Market array file or newline-separated decimal text."""
    path = Path(path)
    with path.open("rb") as fh:
        head = fh.read(14)
    if head.startswith(b"%%MatrixMarket"):
        v = scipy.io.mmread(str(path))
        if scipy.sparse.issparse(v):
            v = v.toarray()
        return np.asarray(v, dtype=np.float64).ravel()
    return np.loadtxt(str(path), dtype=np.float64, ndmin=1)


def _matrix_kind(M: Matrix) -> str:
    return {DenseMatrix: "dense", SparseMatrix: "sparse", PentaBandMatrix: "penta"}[type(M)]


def save_bundle(directory, p: PwlsProblem, genspec: GenSpec | None = None) -> Path:
    """Write T.mtx, b.mtx and manifest.json; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix(directory / "T.mtx", p.T)
    write_vector(directory / "b.mtx", p.b)
    manifest = {
        "matrix": "T.mtx",
        "rhs": "b.mtx",
        "kind": _matrix_kind(p.T),
        "genspec": genspec.to_json_dict() if genspec is not None else None,
    }
    if isinstance(p.T, PentaBandMatrix):
        manifest["grid_side"] = p.T.m
    out = directory / MANIFEST_NAME
    with io.open(out, "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


def load_bundle(path) -> tuple[PwlsProblem, dict]:
    """Read a bundle from a manifest path or its directory."""
    path = Path(path)
    manifest_path = path / MANIFEST_NAME if path.is_dir() else path
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    base = manifest_path.parent
    T = read_matrix(base / manifest["matrix"])
    b = read_vector(base / manifest["rhs"])
    kind = manifest.get("kind", "dense")
    if kind == "penta":
        if isinstance(T, DenseMatrix):
            T = SparseMatrix.from_scipy(scipy.sparse.csr_matrix(T.a))
        T = penta_from_sparse(T, int(manifest["grid_side"]))
    elif kind == "dense" and isinstance(T, SparseMatrix):
        T = DenseMatrix(T.to_dense())
    elif kind == "sparse" and isinstance(T, DenseMatrix):
        T = SparseMatrix.from_scipy(scipy.sparse.csr_matrix(T.a))
    return PwlsProblem(T, b), manifest
