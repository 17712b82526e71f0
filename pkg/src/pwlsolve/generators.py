"""Seeded random instance generators plus the canonical counterexample
instances as built-ins.

All generators draw from numpy's PCG64 stream (a published PCG-family
generator), so instances are reproducible across platforms from
(kind, n, density, seed, diag_offset, offdiag_scale) alone. Draw order is
part of the contract: matrix entries first, then the right-hand side.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
import scipy.sparse

from .core import PwlsProblem
from .errors import UnknownNameError
from .linalg import DenseMatrix, SparseMatrix


class GenKind(enum.Enum):
    DENSE_SDD = "dense"
    SPARSE_SDD = "sparse"
    SPD = "spd"
    DIAGONAL = "diagonal"

    @classmethod
    def parse(cls, value) -> "GenKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown kind {value!r}; expected one of: {names}") from None


@dataclass
class GenSpec:
    """Recipe for one random instance.

    ``diag_offset=None`` means the kind-specific default: 1.001 added on
    top of the off-diagonal absolute row sums for the dominant kinds, and
    the 0.1 identity ridge for the SPD Gram recipe. ``offdiag_scale``
    shrinks or grows the off-diagonal entries (combined with a large
    diag_offset this produces the "almost diagonal" instances).
    """

    n: int
    kind: GenKind = GenKind.DENSE_SDD
    density: float = 0.003
    seed: int = 0
    diag_offset: Optional[float] = None
    offdiag_scale: float = 1.0

    def __post_init__(self):
        self.kind = GenKind.parse(self.kind)
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 < self.density <= 1.0:
            raise ValueError("density must be in (0, 1]")

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind.value,
            "density": self.density,
            "seed": self.seed,
            "diag_offset": self.diag_offset,
            "offdiag_scale": self.offdiag_scale,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "GenSpec":
        return cls(
            n=int(d["n"]),
            kind=GenKind.parse(d.get("kind", "dense")),
            density=float(d.get("density", 0.003)),
            seed=int(d.get("seed", 0)),
            diag_offset=None if d.get("diag_offset") is None else float(d["diag_offset"]),
            offdiag_scale=float(d.get("offdiag_scale", 1.0)),
        )


def generate(spec: GenSpec) -> PwlsProblem:
    return {
        GenKind.DENSE_SDD: gen_dense_sdd,
        GenKind.SPARSE_SDD: gen_sparse_sdd,
        GenKind.SPD: gen_spd,
        GenKind.DIAGONAL: gen_diagonal,
    }[spec.kind](spec)


def gen_dense_sdd(spec: GenSpec) -> PwlsProblem:
    """Dense strongly diagonally dominant instance: off-diagonals i.i.d.
    uniform on [-1,1] (times offdiag_scale), each diagonal entry replaced
    by diag_offset plus the row's off-diagonal absolute sum."""
    assert spec.kind is GenKind.DENSE_SDD
    rng = np.random.default_rng(spec.seed)
    offset = 1.001 if spec.diag_offset is None else spec.diag_offset
    a = rng.uniform(-1.0, 1.0, (spec.n, spec.n)) * spec.offdiag_scale
    np.fill_diagonal(a, 0.0)
    np.fill_diagonal(a, offset + np.abs(a).sum(axis=1))
    b = rng.uniform(-1.0, 1.0, spec.n)
    return PwlsProblem(DenseMatrix(a), b)


def gen_sparse_sdd(spec: GenSpec) -> PwlsProblem:
    """CSR instance with round(density*n^2) off-diagonal entries uniform
    on [-1,1]; the diagonal is always stored and set as in the dense
    recipe. Off-diagonal support is drawn uniformly without replacement
    (rejection top-up keeps the draw deterministic under the seed)."""
    assert spec.kind is GenKind.SPARSE_SDD
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    offset = 1.001 if spec.diag_offset is None else spec.diag_offset
    want = int(round(spec.density * n * n))
    want = min(want, n * n - n)
    chosen = np.empty(0, dtype=np.int64)
    while len(chosen) < want:
        draw = rng.integers(0, n * n, size=max(64, int(1.1 * (want - len(chosen))) + 16))
        draw = draw[draw // n != draw % n]  # off-diagonal only
        merged = np.concatenate([chosen, draw])
        uniq, first = np.unique(merged, return_index=True)
        chosen = uniq[np.argsort(first)]  # keep draw order
    chosen = chosen[:want]
    rows, cols = chosen // n, chosen % n
    vals = rng.uniform(-1.0, 1.0, want) * spec.offdiag_scale
    m = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    off = np.asarray(np.abs(m).sum(axis=1)).ravel()
    m = m + scipy.sparse.diags(offset + off)
    b = rng.uniform(-1.0, 1.0, n)
    return PwlsProblem(SparseMatrix.from_scipy(m), b)


def gen_spd(spec: GenSpec) -> PwlsProblem:
    """Symmetric positive definite Gram recipe T = MM'/n + ridge*Id with
    M uniform on [-1,1]; ridge defaults to 0.1."""
    assert spec.kind is GenKind.SPD
    rng = np.random.default_rng(spec.seed)
    ridge = 0.1 if spec.diag_offset is None else spec.diag_offset
    m = rng.uniform(-1.0, 1.0, (spec.n, spec.n))
    t = spec.offdiag_scale * (m @ m.T) / spec.n + ridge * np.eye(spec.n)
    b = rng.uniform(-1.0, 1.0, spec.n)
    return PwlsProblem(DenseMatrix(t), b)


def gen_diagonal(spec: GenSpec) -> PwlsProblem:
    """Diagonal instance with t_ii uniform on [-2,2] kept clear of the
    excluded values (|t_ii| > 0.05, |t_ii + 1| > 0.05 by rejection), so a
    quarter of the entries land in the interesting (-1,0) band."""
    assert spec.kind is GenKind.DIAGONAL
    rng = np.random.default_rng(spec.seed)
    d = rng.uniform(-2.0, 2.0, spec.n)
    bad = (np.abs(d) <= 0.05) | (np.abs(d + 1.0) <= 0.05)
    while np.any(bad):
        d[bad] = rng.uniform(-2.0, 2.0, int(bad.sum()))
        bad = (np.abs(d) <= 0.05) | (np.abs(d + 1.0) <= 0.05)
    b = rng.uniform(-1.0, 1.0, spec.n)
    return PwlsProblem(DenseMatrix(np.diag(d)), b)


@dataclass
class CanonicalInstance:
    """A built-in instance with its witness points.

    ``cycles`` groups the witnesses into the Newton cycles they form
    (one 3-cycle for spd_3cycle; two 2-cycles for diagdom_nosolution).
    """

    problem: PwlsProblem
    witness: list[np.ndarray]
    cycles: list[list[np.ndarray]]


def _fractions_to_array(rows) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in rows], dtype=np.float64)


# The published 3-cycle points are rounded; these are the exact rational
# solutions of the three cycle equations for the sign patterns
# (1,0,1) -> (0,0,0) -> (0,1,1), which the printed values approximate to ~1e-7.
_SPD3_T = [[Fraction(v, 100) for v in row] for row in ((32, -26, 21), (-26, 33, -23), (21, -23, 17))]
_SPD3_B = [Fraction(v, 100) for v in (18, -48, 30)]
_SPD3_X = (Fraction(81894, 368395), Fraction(-106782, 368395), Fraction(11754, 73679))
_SPD3_Y = (Fraction(-21902, 123765), Fraction(-66598, 41255), Fraction(-722, 24753))
_SPD3_Z = (Fraction(-306, 95), Fraction(18, 95), Fraction(6))

_DD_T = [[Fraction(v, 100) for v in row] for row in ((-26, 16), (23, -33))]
_DD_B = [Fraction(v, 100) for v in (-12, 12)]
_DD_X = (Fraction(-498, 2295), Fraction(582, 2295))
_DD_Y = (Fraction(498, 1055), Fraction(18, 1055))
_DD_Z = (Fraction(102, 245), Fraction(-18, 245))
_DD_W = (Fraction(-102, 1405), Fraction(-582, 1405))


def canonical(name: str) -> CanonicalInstance:
    """Built-in instances: 'spd_3cycle' (symmetric positive definite with a
    Newton 3-cycle) and 'diagdom_nosolution' (diagonally dominant, no
    solution, two Newton 2-cycles)."""
    if name == "spd_3cycle":
        t = _fractions_to_array(_SPD3_T)
        b = np.array([float(v) for v in _SPD3_B])
        pts = [np.array([float(v) for v in w]) for w in (_SPD3_X, _SPD3_Y, _SPD3_Z)]
        return CanonicalInstance(
            problem=PwlsProblem(DenseMatrix(t), b), witness=pts, cycles=[pts]
        )
    if name == "diagdom_nosolution":
        t = _fractions_to_array(_DD_T)
        b = np.array([float(v) for v in _DD_B])
        pts = [np.array([float(v) for v in w]) for w in (_DD_X, _DD_Y, _DD_Z, _DD_W)]
        return CanonicalInstance(
            problem=PwlsProblem(DenseMatrix(t), b),
            witness=pts,
            cycles=[pts[:2], pts[2:]],
        )
    raise UnknownNameError(f"no canonical instance named {name!r}")
