"""Polarization tree over branch signatures and code construction.

A branch signature is a string over {'-', '+'} of length l.  The first
symbol is the outermost (final) split of the synthesized channel and the
last symbol is the transform applied directly to the base channel; this
matches the encoder recursion and the decoding order, which sorts
signatures by their last differing position with '-' before '+'.  A
signature's integer key therefore reads the first symbol as the least
significant bit, and increasing key is decoding order.

Branch channels are built with output merging after every step, which is
what keeps depth-8 trees tractable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatchError, TooLargeError
from .gfq import FieldMatrix, field_inv, mat_rank
from .mac import (
    DEFAULT_MERGE_TOL,
    DiscreteMac,
    all_vectors,
    merge_outputs,
    restrict,
    sum_capacity,
    transform_minus,
    transform_plus,
)
from .subspace import Subspace

MAX_BRANCH_OUTPUTS = 10 ** 5
MINUS, PLUS = "-", "+"


# -- signatures and their total order -----------------------------------------

def check_sig(sig: str) -> str:
    if any(c not in "-+" for c in sig):
        raise ValueError(f"bad branch signature {sig!r}")
    return sig


def sig_key(sig: str) -> int:
    """Integer rank of a signature in decoding order (first symbol = LSB)."""
    check_sig(sig)
    return sum(1 << i for i, c in enumerate(sig) if c == PLUS)


def key_sig(key: int, length: int) -> str:
    return "".join(PLUS if key >> i & 1 else MINUS for i in range(length))


def branch_order_cmp(a: str, b: str) -> int:
    """-1, 0 or 1; the last differing position decides, '-' before '+'."""
    check_sig(a)
    check_sig(b)
    if len(a) != len(b):
        raise LengthMismatchError(f"lengths {len(a)} and {len(b)} differ")
    ka, kb = sig_key(a), sig_key(b)
    return (ka > kb) - (ka < kb)


def all_sigs(length: int):
    """All 2^length signatures in decoding order."""
    return [key_sig(k, length) for k in range(1 << length)]


# -- branch channel evaluation --------------------------------------------------

def _apply(channel: DiscreteMac, symbol: str, merge_tol: float,
           max_outputs: int) -> DiscreteMac:
    out = transform_minus(channel) if symbol == MINUS else transform_plus(channel)
    out = merge_outputs(out, merge_tol)
    if out.output_size > max_outputs:
        raise TooLargeError(
            f"branch channel has {out.output_size} outputs after merging "
            f"(cap {max_outputs})")
    return out


def polarize_branch(channel: DiscreteMac, sig: str,
                    merge_tol: float = DEFAULT_MERGE_TOL,
                    max_outputs: int = MAX_BRANCH_OUTPUTS) -> DiscreteMac:
    """Synthesized channel of one branch.

    Symbols are applied to the base channel starting from the signature's
    last symbol, so the first symbol ends up as the outermost transform;
    outputs are merged after every step.
    """
    check_sig(sig)
    out = channel
    for symbol in reversed(sig):
        out = _apply(out, symbol, merge_tol, max_outputs)
    return out


def iter_branch_channels(channel: DiscreteMac, depth: int,
                         merge_tol: float = DEFAULT_MERGE_TOL,
                         max_outputs: int = MAX_BRANCH_OUTPUTS):
    """Yield (sig, channel) for all depth-l branches in decoding order,
    sharing intermediate transforms along the tree."""
    def walk(node: DiscreteMac, suffix: str):
        if len(suffix) == depth:
            yield suffix, node
            return
        for symbol in (MINUS, PLUS):
            child = _apply(node, symbol, merge_tol, max_outputs)
            yield from walk(child, symbol + suffix)

    yield from walk(channel, "")


def level_channels(channel: DiscreteMac, depth: int,
                   merge_tol: float = DEFAULT_MERGE_TOL,
                   max_outputs: int = MAX_BRANCH_OUTPUTS):
    """Channels of every level-`depth` branch, order not meaningful."""
    out = [channel]
    for _ in range(depth):
        nxt = []
        for c in out:
            nxt.append(_apply(c, MINUS, merge_tol, max_outputs))
            nxt.append(_apply(c, PLUS, merge_tol, max_outputs))
        out = nxt
    return out


# -- per-direction statistics and linear-channel detection ----------------------

def projective_directions(q: int, m: int):
    """One representative per 1-dim subspace of GF(q)^m: all nonzero vectors
    whose first nonzero coordinate is 1, in input-index order."""
    vecs = all_vectors(q, m)
    dirs = []
    for i in range(1, q ** m):
        vec = vecs[i]
        nz = np.nonzero(vec)[0]
        if vec[nz[0]] == 1:
            dirs.append(vec.copy())
    return dirs


def canonical_direction(vec: np.ndarray, q: int) -> tuple:
    nz = np.nonzero(vec % q)[0]
    if nz.size == 0:
        raise ValueError("zero vector has no direction")
    scale = field_inv(int(vec[nz[0]]) % q, q)
    return tuple(((vec * scale) % q).tolist())


@dataclass(frozen=True)
class DirectionStat:
    alpha: tuple   # canonical direction vector
    i: float       # mutual information of the direction channel, base q
    z: float       # Bhattacharyya parameter of the same channel


def direction_stats(channel: DiscreteMac):
    """I and Z of the single-user channel of every projective direction."""
    stats = []
    for alpha in projective_directions(channel.q, channel.m):
        a = FieldMatrix(alpha.reshape(-1, 1), channel.q)
        single = restrict(channel, a)
        stats.append(DirectionStat(alpha=tuple(alpha.tolist()),
                                   i=sum_capacity(single),
                                   z=single.bhattacharyya()))
    return stats


def detect_linear(channel: DiscreteMac, eps: float, stats=None):
    """Find the emergent deterministic-linear part of a nearly polarized
    channel.

    Collects the directions with I > 1 - eps, spans them, and verifies the
    whole span is made of such directions.  Returns (columns matrix, rank)
    on success -- rank 0 with an empty matrix when no direction is good --
    and None when the good set fails to be a subspace.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    if stats is None:
        stats = direction_stats(channel)
    q, m = channel.q, channel.m
    i_of = {st.alpha: st.i for st in stats}
    good = [st.alpha for st in stats if st.i > 1 - eps]
    span = Subspace.from_vectors(good, m, q)
    for vec in span.vectors():
        if not vec.any():
            continue
        if i_of[canonical_direction(vec, q)] <= 1 - eps:
            return None
    cols = FieldMatrix(span.basis.data.T.copy(), q)
    return cols, span.dim


# -- code specification ----------------------------------------------------------

@dataclass(frozen=True)
class BranchCode:
    sig: str
    in_good_set: bool
    r: int
    a_columns: tuple          # r column vectors of length m (tuples)
    s_users: tuple            # 1-based users carrying information
    frozen: tuple             # m flags, frozen[k-1] == 1 iff user k frozen
    z_sum: float
    i_branch: float
    i_detected: float

    def a_matrix(self, q: int) -> FieldMatrix:
        if self.r == 0:
            return FieldMatrix(np.zeros((len(self.frozen), 0), dtype=np.int64), q)
        return FieldMatrix(np.array(self.a_columns, dtype=np.int64).T, q)


@dataclass(frozen=True)
class CodeSpec:
    q: int
    m: int
    l: int
    eps: float
    z_budget: float
    merge_tol: float
    branches: tuple           # BranchCode in decoding order
    rate_vector: tuple        # R_k per user
    sum_rate: float
    union_bound: float

    @property
    def block_length(self) -> int:
        return 1 << self.l

    @property
    def good_count(self) -> int:
        return sum(1 for b in self.branches if b.in_good_set)

    def info_slots(self):
        """(sig, user) pairs carrying information, in decoding order."""
        return [(b.sig, k) for b in self.branches for k in b.s_users]

    def frozen_slots(self):
        return [(b.sig, k) for b in self.branches
                for k in range(1, self.m + 1) if b.frozen[k - 1]]

    def check(self):
        """Internal consistency of the stored code."""
        n = self.block_length
        for b in self.branches:
            a = b.a_matrix(self.q)
            assert b.r == len(b.s_users) == a.cols
            if b.r:
                assert mat_rank(a) == b.r
                rows = FieldMatrix(a.data[[k - 1 for k in b.s_users], :], self.q)
                assert mat_rank(rows) == b.r
            for k in range(1, self.m + 1):
                assert (b.frozen[k - 1] == 0) == (k in b.s_users)
        for k in range(1, self.m + 1):
            rk = sum(1 - b.frozen[k - 1] for b in self.branches) / n
            assert abs(rk - self.rate_vector[k - 1]) < 1e-12
        r_total = sum(b.r for b in self.branches if b.in_good_set) / n
        assert abs(r_total - self.sum_rate) < 1e-12
        return True

    def to_dict(self) -> dict:
        return {
            "q": self.q, "m": self.m, "l": self.l,
            "eps": self.eps, "z_budget": self.z_budget,
            "merge_tol": self.merge_tol,
            "rate_vector": list(self.rate_vector),
            "sum_rate": self.sum_rate,
            "union_bound": self.union_bound,
            "branches": [
                {
                    "sig": b.sig,
                    "in_good_set": b.in_good_set,
                    "r": b.r,
                    "a_columns": [list(c) for c in b.a_columns],
                    "s_users": list(b.s_users),
                    "frozen": list(b.frozen),
                    "z_sum": b.z_sum,
                    "i_branch": b.i_branch,
                    "i_detected": b.i_detected,
                }
                for b in self.branches
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CodeSpec":
        branches = tuple(
            BranchCode(
                sig=b["sig"],
                in_good_set=bool(b["in_good_set"]),
                r=int(b["r"]),
                a_columns=tuple(tuple(int(x) for x in c) for c in b["a_columns"]),
                s_users=tuple(int(k) for k in b["s_users"]),
                frozen=tuple(int(f) for f in b["frozen"]),
                z_sum=float(b["z_sum"]),
                i_branch=float(b["i_branch"]),
                i_detected=float(b["i_detected"]),
            )
            for b in d["branches"]
        )
        return cls(q=int(d["q"]), m=int(d["m"]), l=int(d["l"]),
                   eps=float(d["eps"]), z_budget=float(d["z_budget"]),
                   merge_tol=float(d["merge_tol"]), branches=branches,
                   rate_vector=tuple(float(r) for r in d["rate_vector"]),
                   sum_rate=float(d["sum_rate"]),
                   union_bound=float(d["union_bound"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def _smallest_independent_rows(a: FieldMatrix) -> tuple:
    """Lexicographically smallest set of row indices (1-based) whose rows of
    `a` are linearly independent and span the row space; greedy is optimal
    for this matroid."""
    chosen: list[int] = []
    current = np.zeros((0, a.cols), dtype=np.int64)
    for row in range(a.rows):
        cand = np.vstack([current, a.data[row: row + 1]])
        if mat_rank(FieldMatrix(cand, a.q)) == len(chosen) + 1:
            chosen.append(row + 1)
            current = cand
        if len(chosen) == a.cols:
            break
    return tuple(chosen)


def build_code(channel: DiscreteMac, depth: int, eps: float, z_budget: float,
               merge_tol: float = DEFAULT_MERGE_TOL,
               max_outputs: int = MAX_BRANCH_OUTPUTS) -> CodeSpec:
    """Construct the frozen map for a depth-l polar code on `channel`.

    A branch joins the good set when linear detection succeeds, the
    detected information accounts for the branch's within eps both in
    value and in integer rank, and the summed direction Bhattacharyya
    parameters stay below z_budget.  Good branches get the lexicographically
    smallest independent user set; everything else is frozen.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    if z_budget <= 0:
        raise ValueError("z_budget must be positive")
    q, m = channel.q, channel.m
    branches = []
    union_bound = 0.0
    for sig, ch in iter_branch_channels(channel, depth, merge_tol, max_outputs):
        stats = direction_stats(ch)
        i_branch = sum_capacity(ch)
        det = detect_linear(ch, eps, stats)
        in_good = False
        r = 0
        a_cols: tuple = ()
        s_users: tuple = ()
        z_sum = 0.0
        i_det = 0.0
        if det is not None:
            a, r = det
            z_of = {st.alpha: st.z for st in stats}
            z_sum = float(sum(z_of[tuple(a.data[:, j].tolist())] for j in range(r)))
            i_det = sum_capacity(restrict(ch, a)) if r else 0.0
            in_good = (abs(i_det - i_branch) < eps
                       and abs(r - i_branch) < eps
                       and z_sum < z_budget)
            a_cols = tuple(tuple(a.data[:, j].tolist()) for j in range(r))
        if in_good:
            s_users = _smallest_independent_rows(det[0])
            union_bound += q * z_sum
        else:
            # Fully frozen branch: no information map is stored.
            r, a_cols = 0, ()
        frozen = tuple(0 if (in_good and k in s_users) else 1
                       for k in range(1, m + 1))
        branches.append(BranchCode(
            sig=sig, in_good_set=in_good, r=r, a_columns=a_cols,
            s_users=s_users, frozen=frozen,
            z_sum=z_sum, i_branch=i_branch, i_detected=i_det))
    n = 1 << depth
    rate_vector = tuple(
        sum(1 - b.frozen[k] for b in branches) / n for k in range(m))
    sum_rate = sum(b.r for b in branches if b.in_good_set) / n
    return CodeSpec(q=q, m=m, l=depth, eps=eps, z_budget=z_budget,
                    merge_tol=merge_tol, branches=tuple(branches),
                    rate_vector=rate_vector, sum_rate=sum_rate,
                    union_bound=union_bound)


# -- martingale diagnostics -------------------------------------------------------

@dataclass(frozen=True)
class MartingaleReport:
    subsets: tuple            # user subsets, each a tuple
    levels: tuple             # level indices 0..l
    averages: tuple           # averages[level][subset position]
    full_set_constant: bool   # within 1e-6 of level 0
    strict_non_increasing: bool  # per strict subset, 1e-9 slack

    def column(self, subset) -> list:
        j = self.subsets.index(tuple(subset))
        return [row[j] for row in self.averages]


def martingale_report(channel: DiscreteMac, depth: int,
                      merge_tol: float = DEFAULT_MERGE_TOL,
                      max_outputs: int = MAX_BRANCH_OUTPUTS) -> MartingaleReport:
    """Per-level averages of I[S] over all branches, with the conservation
    flags: the full-set average is a constant and strict subsets never
    increase."""
    m = channel.m
    subsets = []
    for mask in range(1, 2 ** m):
        subsets.append(tuple(k for k in range(1, m + 1) if mask >> (k - 1) & 1))
    rows = []
    current = [channel]
    for lvl in range(depth + 1):
        rows.append(tuple(float(np.mean([c.mutual_info(s) for c in current]))
                          for s in subsets))
        if lvl < depth:
            nxt = []
            for c in current:
                nxt.append(_apply(c, MINUS, merge_tol, max_outputs))
                nxt.append(_apply(c, PLUS, merge_tol, max_outputs))
            current = nxt
    full = subsets.index(tuple(range(1, m + 1)))
    full_vals = [r[full] for r in rows]
    full_const = max(abs(v - full_vals[0]) for v in full_vals) < 1e-6
    strict_ok = True
    for j, s in enumerate(subsets):
        if j == full:
            continue
        vals = [r[j] for r in rows]
        if any(vals[i + 1] > vals[i] + 1e-9 for i in range(len(vals) - 1)):
            strict_ok = False
    return MartingaleReport(subsets=tuple(subsets), levels=tuple(range(depth + 1)),
                            averages=tuple(rows), full_set_constant=full_const,
                            strict_non_increasing=strict_ok)
