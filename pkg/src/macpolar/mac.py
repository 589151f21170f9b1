"""Explicit discrete m-user multiple access channels over GF(q).

A channel is a dense conditional probability table P(y | x1..xm).  Input
vectors are flattened to little-endian radix-q integers (user 1 is the
least significant digit); outputs are anonymous integer indices.  All
mutual informations use logarithms base q, so every single-user quantity
lives in [0, 1] and the m-user sum capacity in [0, m].
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import (
    BadIndexSetError,
    BadRowSumError,
    NegativeProbabilityError,
    NotFullRankError,
    NotSingleUserError,
)
from .gfq import FieldMatrix, check_prime, mat_rank

ROW_SUM_TOL = 1e-12
DEFAULT_MERGE_TOL = 1e-9


# -- input-vector indexing ---------------------------------------------------

@lru_cache(maxsize=None)
def all_vectors(q: int, m: int) -> np.ndarray:
    """All q^m input vectors, row i being the digits of i base q (user 1
    least significant).  Read-only."""
    idx = np.arange(q ** m)
    out = np.empty((q ** m, m), dtype=np.int64)
    for k in range(m):
        out[:, k] = (idx // q ** k) % q
    out.setflags(write=False)
    return out


def vec_to_index(vec, q: int) -> int:
    v = np.asarray(vec, dtype=np.int64) % q
    return int(sum(int(v[k]) * q ** k for k in range(len(v))))


@lru_cache(maxsize=None)
def add_table(q: int, m: int) -> np.ndarray:
    """ADD[i, j] = index of (vec_i + vec_j) mod q.  Read-only."""
    vecs = all_vectors(q, m)
    powers = q ** np.arange(m)
    table = ((vecs[:, None, :] + vecs[None, :, :]) % q) @ powers
    table.setflags(write=False)
    return table


# -- channel type -------------------------------------------------------------

class DiscreteMac:
    """Explicit m-user MAC with a (q^m, n_outputs) float64 table."""

    __slots__ = ("q", "m", "table")

    def __init__(self, q: int, m: int, table):
        check_prime(q)
        tbl = np.ascontiguousarray(table, dtype=np.float64)
        if tbl.ndim != 2 or tbl.shape[0] != q ** m:
            raise ValueError(f"table must be (q^m, outputs) = ({q ** m}, ...), "
                             f"got {tbl.shape}")
        tbl.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "table", tbl)

    def __setattr__(self, name, value):
        raise AttributeError("DiscreteMac is immutable")

    @property
    def output_size(self) -> int:
        return self.table.shape[1]

    def __repr__(self) -> str:
        return f"DiscreteMac(q={self.q}, m={self.m}, outputs={self.output_size})"

    @classmethod
    def deterministic(cls, q: int, m: int, output_of_input) -> "DiscreteMac":
        """Channel y = f(x) from a list mapping input index -> output index."""
        mapping = np.asarray(output_of_input, dtype=np.int64)
        n_out = int(mapping.max()) + 1 if mapping.size else 1
        table = np.zeros((q ** m, n_out))
        table[np.arange(q ** m), mapping] = 1.0
        return cls(q, m, table)

    @classmethod
    def identity(cls, q: int, m: int) -> "DiscreteMac":
        """Perfect channel: the output reveals the input vector."""
        return cls.deterministic(q, m, np.arange(q ** m))

    @classmethod
    def useless(cls, q: int, m: int, n_outputs: int = 1) -> "DiscreteMac":
        """Output independent of the input."""
        return cls(q, m, np.full((q ** m, n_outputs), 1.0 / n_outputs))

    # Convenience method aliases for the module-level operations.
    def validate(self):
        validate(self)
        return self

    def mutual_info(self, users) -> float:
        return mutual_info(self, users)

    def sum_capacity(self) -> float:
        return sum_capacity(self)

    def minus(self) -> "DiscreteMac":
        return transform_minus(self)

    def plus(self) -> "DiscreteMac":
        return transform_plus(self)

    def restrict(self, a: FieldMatrix, b: FieldMatrix | None = None) -> "DiscreteMac":
        return restrict(self, a, b)

    def merge(self, tol: float = DEFAULT_MERGE_TOL) -> "DiscreteMac":
        return merge_outputs(self, tol)

    def bhattacharyya(self) -> float:
        return bhattacharyya(self)


def validate(mac: DiscreteMac) -> None:
    """Check row sums (within 1e-12) and non-negativity."""
    tbl = mac.table
    neg = np.argwhere(tbl < 0)
    if neg.size:
        r, c = map(int, neg[0])
        raise NegativeProbabilityError(r, c, float(tbl[r, c]))
    sums = tbl.sum(axis=1)
    bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
    if bad.size:
        r = int(bad[0])
        raise BadRowSumError(r, float(sums[r]))


# -- information functionals ---------------------------------------------------

def _entropy(p: np.ndarray, q: int) -> float:
    """Entropy in base-q units with the 0 log 0 = 0 convention."""
    p = p[p > 0]
    return float(-(p * (np.log(p) / np.log(q))).sum())


def _users_to_axes(users, m: int):
    idx = sorted(set(int(u) for u in users))
    if not idx:
        raise BadIndexSetError("index set is empty")
    if idx[0] < 1 or idx[-1] > m:
        raise BadIndexSetError(f"indices {idx} out of range 1..{m}")
    return idx


def mutual_info(mac: DiscreteMac, users) -> float:
    """I(X(S); Y, X(S^c)) under independent uniform inputs, base q.

    S is the 1-based user subset; the complement's inputs are side
    information at the receiver.
    """
    q, m = mac.q, mac.m
    s = _users_to_axes(users, m)
    joint = mac.table / q ** m                     # p(x, y)
    # Reshape to (x_m, ..., x_1, y): user k lives on axis m - k.
    shaped = joint.reshape((q,) * m + (-1,))
    s_axes = tuple(m - k for k in s)
    h_y_xc = _entropy(shaped.sum(axis=s_axes).ravel(), q)
    h_all = _entropy(joint.ravel(), q)
    return len(s) + h_y_xc - h_all


def sum_capacity(mac: DiscreteMac) -> float:
    """I(X1..Xm; Y): mutual information of the full user set."""
    return mutual_info(mac, range(1, mac.m + 1))


def bhattacharyya(mac: DiscreteMac) -> float:
    """Bhattacharyya parameter of a single-user channel: the mean pairwise
    Hellinger affinity between distinct input rows, in [0, 1]."""
    if mac.m != 1:
        raise NotSingleUserError(f"channel has m={mac.m}")
    s = np.sqrt(mac.table)
    gram = s @ s.T
    q = mac.q
    return float((gram.sum() - np.trace(gram)) / (q * (q - 1)))


# -- polarization transforms ---------------------------------------------------

def transform_minus(mac: DiscreteMac) -> DiscreteMac:
    """First-step bad channel: P-(y1, y2 | u) = q^-m sum_w P(y1|u+w) P(y2|w).

    Output index is y1 * n + y2.
    """
    q, m = mac.q, mac.m
    t = mac.table
    g = t[add_table(q, m)]                         # g[u, w, y1] = P(y1 | u+w)
    out = np.einsum("uwa,wb->uab", g, t) / q ** m
    return DiscreteMac(q, m, out.reshape(q ** m, -1))


def transform_plus(mac: DiscreteMac) -> DiscreteMac:
    """First-step good channel: P+(y1, y2, u1 | u2) = q^-m P(y1|u1+u2) P(y2|u2).

    Output index is (y1 * n + y2) * q^m + u1 (mixed radix, u1 fastest).
    """
    q, m = mac.q, mac.m
    t = mac.table
    g = t[add_table(q, m)]                         # g[u1, u2, y1]
    out = np.einsum("uwa,wb->wabu", g, t) / q ** m
    return DiscreteMac(q, m, out.reshape(q ** m, -1))


def restrict(mac: DiscreteMac, a: FieldMatrix, b: FieldMatrix | None = None) -> DiscreteMac:
    """Synthesized channel that asks for a^T x when the receiver is also
    handed b^T x alongside y.

    a is m x n1 and b is m x n2 (None or zero columns for no side info);
    [a b] must have full column rank.  The result is an n1-user MAC with
    output index y * q^n2 + (index of b^T x).
    """
    q, m = mac.q, mac.m
    if b is None or b.cols == 0:
        b = FieldMatrix(np.zeros((m, 0), dtype=np.int64), q)
    if a.q != q or b.q != q or a.rows != m or b.rows != m:
        raise ValueError("restriction matrices do not match the channel")
    n1, n2 = a.cols, b.cols
    combined = a.hstack(b) if n1 else b
    if mat_rank(combined) != n1 + n2:
        raise NotFullRankError("[a b] must have full column rank")
    vecs = all_vectors(q, m)
    u_idx = (vecs @ a.data) % q @ (q ** np.arange(n1)) if n1 else np.zeros(q ** m, dtype=np.int64)
    v_idx = (vecs @ b.data) % q @ (q ** np.arange(n2)) if n2 else np.zeros(q ** m, dtype=np.int64)
    n_y = mac.output_size
    out = np.zeros((q ** n1, n_y * q ** n2))
    scale = 1.0 / q ** (m - n1)
    for x in range(q ** m):
        cols = v_idx[x] + np.arange(n_y) * q ** n2
        out[u_idx[x], cols] += mac.table[x] * scale
    return DiscreteMac(q, n1, out)


def merge_outputs(mac: DiscreteMac, tol: float = DEFAULT_MERGE_TOL) -> DiscreteMac:
    """Merge output symbols whose conditional-probability columns are
    proportional within `tol` (relative to the column mass) and drop
    zero-probability outputs.

    Proportional columns are statistically indistinguishable given the
    input, so every I[S] and Z is preserved; this is what keeps deep
    polarization trees tractable.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    t = mac.table
    sums = t.sum(axis=0)
    keep = np.nonzero(sums > 0.0)[0]
    if keep.size == 0:
        raise ValueError("channel has no outputs with positive probability")
    dirs = t[:, keep] / sums[keep]
    order = keep[np.lexsort(dirs[::-1])]           # lex order on columns
    groups: list[list[int]] = []
    rep: np.ndarray | None = None
    for col in order:
        d = t[:, col] / sums[col]
        if rep is not None and np.max(np.abs(d - rep)) <= tol:
            groups[-1].append(col)
        else:
            groups.append([col])
            rep = d
    groups.sort(key=min)                           # deterministic output order
    merged = np.column_stack([t[:, g].sum(axis=1) for g in groups])
    return DiscreteMac(mac.q, mac.m, merged)
