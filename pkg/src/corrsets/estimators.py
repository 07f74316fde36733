"""Information-theoretic scores for categorical attribute subsets.

Everything here is a pure function of empirical counts. The central
quantity is the normalized total correlation of a subset: the sum of
marginal entropies minus the joint entropy, divided by the largest value
that difference can take (sum minus max). The plug-in estimate of this
ratio is inflated by chance on sparse data, so we also compute correction
terms derived from a fixed-marginal permutation null model:

* ``expected_mi_permutation`` -- the exact expected mutual information
  under random permutation of one variable (hypergeometric sum),
* ``m0_upper`` -- a closed-form upper bound on that expectation in terms
  of domain sizes,
* ``m0_relaxed`` -- a further relaxation replacing joint domain sizes by
  products of marginal domain sizes, which makes the ordering that
  maximizes the summed correction computable by sorting.

All logarithms are base 2 (bits). The normalized scores are ratios of
bit quantities and therefore invariant to the choice of base.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

__all__ = [
    "RowPartition",
    "SubsetScore",
    "ESTIMATORS",
    "entropy",
    "refine_partition",
    "expected_mi_permutation",
    "m0_upper",
    "m0_relaxed",
    "correction_relaxed_bits",
    "correction_relaxed",
    "correction_exact",
    "correction_upper",
    "assemble_score",
    "score_subset",
]

ESTIMATORS = ("plugin", "relaxed", "upper", "exact")

ORACLE_MAX_MEMBERS = 8  # factorial enumeration cap for exact/upper corrections

_LOG2 = math.log(2.0)


def entropy(counts, n: int) -> float:
    """Plug-in Shannon entropy in bits of a count vector summing to n.

    Zero counts contribute nothing. The caller guarantees sum(counts) == n.
    """
    c = np.asarray(counts, dtype=np.float64)
    c = c[c > 0]
    if c.size == 0:
        return 0.0
    return float(np.log2(n) - np.dot(c, np.log2(c)) / n)


@dataclass(frozen=True, eq=False)
class RowPartition:
    """Grouping of the n rows into the distinct joint-value cells of a subset.

    ``cell_of_row[r]`` is the dense cell index of row r, ``cell_counts[c]``
    the size of cell c. Refining by one attribute at a time makes this the
    incremental carrier for joint entropies.
    """

    cell_of_row: np.ndarray
    cell_counts: np.ndarray
    cell_count: int

    @property
    def n(self) -> int:
        return int(self.cell_of_row.shape[0])

    @classmethod
    def trivial(cls, n: int) -> "RowPartition":
        """The single-cell partition (empty attribute set)."""
        return cls(
            cell_of_row=np.zeros(n, dtype=np.int64),
            cell_counts=np.array([n], dtype=np.int64),
            cell_count=1,
        )

    def joint_entropy(self) -> float:
        return entropy(self.cell_counts, self.n)


def refine_partition(parent: RowPartition, attr) -> RowPartition:
    """Split every cell of ``parent`` by the codes of one more attribute.

    ``attr`` needs ``codes`` (dense integer array of length n) and
    ``domain_size``. Output cells are dense and ordered by (parent cell,
    code), which keeps repeated refinement deterministic.
    """
    domain = int(attr.domain_size)
    if domain <= 1:
        return parent
    keys = parent.cell_of_row * domain + attr.codes
    _, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
    return RowPartition(
        cell_of_row=inverse.astype(np.int64, copy=False),
        cell_counts=counts.astype(np.int64, copy=False),
        cell_count=int(counts.shape[0]),
    )


@lru_cache(maxsize=8)
def _log_factorials(n: int) -> np.ndarray:
    """Table of ln(k!) for k = 0..n."""
    table = gammaln(np.arange(n + 1, dtype=np.float64) + 1.0)
    table.flags.writeable = False
    return table


def expected_mi_permutation(row_marginals, col_marginals, n: int) -> float:
    """Expected plug-in mutual information (bits) under the permutation model.

    The null model keeps both marginal count vectors fixed and averages the
    plug-in MI over all n! row permutations of one variable. Each cell count
    then follows a hypergeometric law, so the expectation reduces to

        sum_{i,j} sum_c (c/n) log2(n c / (a_i b_j)) P_hyp(c; n, a_i, b_j)

    with c running over max(0, a_i + b_j - n) .. min(a_i, b_j). Probabilities
    are evaluated in log space from a factorial table, so the computation is
    overflow-free for large n.
    """
    a = np.asarray(row_marginals, dtype=np.int64)
    b = np.asarray(col_marginals, dtype=np.int64)
    if a.sum() != n or b.sum() != n:
        raise ValueError("marginal sums must both equal n")
    lf = _log_factorials(n)
    log2n = math.log2(n)
    total = 0.0
    for ai in a:
        ai = int(ai)
        if ai == 0:
            continue
        base_a = lf[ai] + lf[n - ai]
        log2a = math.log2(ai)
        for bj in b:
            bj = int(bj)
            if bj == 0:
                continue
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            if hi < lo:
                continue  # only c = 0 is feasible; it contributes nothing
            cs = np.arange(lo, hi + 1, dtype=np.int64)
            log_p = (base_a + lf[bj] + lf[n - bj] - lf[n]) - (
                lf[cs] + lf[ai - cs] + lf[bj - cs] + lf[n - ai - bj + cs]
            )
            terms = (cs / n) * (np.log2(cs) + log2n - log2a - math.log2(bj))
            total += float(np.dot(terms, np.exp(log_p)))
    return max(total, 0.0)


def m0_upper(dx: int, dy: int, n: int) -> float:
    """Domain-size upper bound on the permutation-model expected MI (bits).

    log2((n + dx*dy - dx - dy) / (n - 1)); nonnegative because
    dx*dy >= dx + dy - 1 for positive integers.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    return math.log2((n + dx * dy - dx - dy) / (n - 1))


def m0_relaxed(log2_prefix_product: float, dnext: int, n: int) -> float:
    """Relaxed expected-MI bound using a product of marginal domain sizes.

    Evaluates log2((n + P*dnext) / (n - 1)) where P is given as
    log2_prefix_product bits. Beyond 63 bits the product is folded in log
    space, so domain-size products that overflow machine integers are fine.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if log2_prefix_product < 0:
        raise ValueError("prefix product must be >= 1")
    level = log2_prefix_product + math.log2(dnext)
    if level <= 63:
        return math.log2((n + 2.0**level) / (n - 1))
    return level + math.log1p(n * 2.0 ** (-level)) / _LOG2 - math.log2(n - 1)


def correction_relaxed_bits(domain_sizes, n: int) -> float:
    """Unnormalized relaxed correction: summed m0_relaxed terms, in bits.

    The ordering that maximizes the sum puts domain sizes in decreasing
    order, so no enumeration over orderings is needed.
    """
    sizes = sorted((int(d) for d in domain_sizes), reverse=True)
    if len(sizes) < 2:
        return 0.0
    total = 0.0
    level = math.log2(sizes[0])
    for d in sizes[1:]:
        total += m0_relaxed(level, d, n)
        level += math.log2(d)
    return total


def correction_relaxed(domain_sizes, n: int, w_norm: float) -> float:
    """Relaxed correction term: max-over-orderings bound sum over the normalizer."""
    sizes = list(domain_sizes)
    if len(sizes) < 2:
        raise ValueError("need at least 2 domain sizes")
    if w_norm <= 0:
        raise ValueError("degenerate normalizer; caller applies the zero-score rule")
    return correction_relaxed_bits(sizes, n) / w_norm


def _ordered_members(dataset, members) -> list[int]:
    """Validate and canonicalize member indices: decreasing entropy, index tiebreak."""
    idx = list(members)
    if len(set(idx)) != len(idx):
        raise ValueError("member indices must be distinct")
    if len(idx) < 2:
        raise ValueError("need at least 2 members")
    d = len(dataset.attributes)
    for i in idx:
        if not 0 <= i < d:
            raise ValueError(f"attribute index {i} out of range")
    return sorted(idx, key=lambda i: (-dataset.attributes[i].entropy, i))


def _normalizer(dataset, ordered) -> float:
    h_sum = 0.0
    for i in ordered:
        h_sum += dataset.attributes[i].entropy
    return h_sum - dataset.attributes[ordered[0]].entropy


def _max_correction_bits(dataset, members, term) -> float:
    """Maximize a summed per-step correction over all member orderings.

    ``term(prefix_partition, attr)`` supplies the step value. Partitions and
    step values are memoized on the prefix *set*, which collapses the m!
    orderings to the distinct (prefix, next) pairs.
    """
    ordered = _ordered_members(dataset, members)
    if len(ordered) > ORACLE_MAX_MEMBERS:
        raise ValueError(f"oracle correction limited to {ORACLE_MAX_MEMBERS} members")
    n = dataset.n
    parts: dict[frozenset, RowPartition] = {frozenset(): RowPartition.trivial(n)}
    terms: dict[tuple[frozenset, int], float] = {}

    def partition_of(prefix: frozenset) -> RowPartition:
        part = parts.get(prefix)
        if part is None:
            smaller = min(prefix)
            part = refine_partition(
                partition_of(prefix - {smaller}), dataset.attributes[smaller]
            )
            parts[prefix] = part
        return part

    best = -math.inf
    for perm in itertools.permutations(ordered):
        total = 0.0
        prefix = frozenset({perm[0]})
        for nxt in perm[1:]:
            key = (prefix, nxt)
            value = terms.get(key)
            if value is None:
                value = term(partition_of(prefix), dataset.attributes[nxt])
                terms[key] = value
            total += value
            prefix = prefix | {nxt}
        best = max(best, total)
    return best


def _correction_exact_bits(dataset, ordered) -> float:
    n = dataset.n

    def term(part: RowPartition, attr) -> float:
        counts = np.bincount(attr.codes, minlength=attr.domain_size)
        return expected_mi_permutation(part.cell_counts, counts, n)

    return _max_correction_bits(dataset, ordered, term)


def _correction_upper_bits(dataset, ordered) -> float:
    n = dataset.n

    def term(part: RowPartition, attr) -> float:
        return m0_upper(part.cell_count, attr.domain_size, n)

    return _max_correction_bits(dataset, ordered, term)


def correction_exact(dataset, members) -> float:
    """Exact permutation-model correction term (test oracle, <= 8 members).

    Maximizes the summed expected MI between each joint prefix and the next
    attribute over all orderings, normalized by the subset's normalizer.
    """
    ordered = _ordered_members(dataset, members)
    w_norm = _normalizer(dataset, ordered)
    if w_norm <= 0:
        raise ValueError("degenerate normalizer; caller applies the zero-score rule")
    return _correction_exact_bits(dataset, ordered) / w_norm


def correction_upper(dataset, members) -> float:
    """Domain-size-bound correction term (test oracle, <= 8 members).

    As :func:`correction_exact` but each step uses :func:`m0_upper` with the
    observed count of distinct joint prefix values.
    """
    ordered = _ordered_members(dataset, members)
    w_norm = _normalizer(dataset, ordered)
    if w_norm <= 0:
        raise ValueError("degenerate normalizer; caller applies the zero-score rule")
    return _correction_upper_bits(dataset, ordered) / w_norm


@dataclass(frozen=True)
class SubsetScore:
    """All score components of one attribute subset.

    ``members`` are attribute indices in decreasing marginal-entropy order.
    ``total_correlation`` is entropy_sum - joint_entropy, ``normalizer`` is
    entropy_sum - entropy_max, ``plugin_score`` their ratio clamped to [0, 1],
    and ``corrected_score`` the plugin score minus ``correction``. A subset
    whose normalizer is zero cannot express correlation and scores 0 across
    the board.
    """

    members: tuple[int, ...]
    entropy_sum: float
    entropy_max: float
    joint_entropy: float
    total_correlation: float
    normalizer: float
    correction: float
    plugin_score: float
    corrected_score: float

    @property
    def depth(self) -> int:
        return len(self.members)


def assemble_score(
    members: tuple[int, ...],
    entropy_sum: float,
    entropy_max: float,
    joint_entropy: float,
    domain_sizes,
    n: int,
    correction_bits=None,
) -> SubsetScore:
    """Build a SubsetScore from precomputed entropy components.

    Glue shared by the from-scratch scorer and the incremental search so
    both produce bit-identical results. ``correction_bits`` defaults to the
    relaxed correction; pass an unnormalized value (or 0.0) to override.
    """
    total_correlation = entropy_sum - joint_entropy
    normalizer = entropy_sum - entropy_max
    if normalizer <= 0.0:
        return SubsetScore(
            members, entropy_sum, entropy_max, joint_entropy,
            total_correlation, normalizer, 0.0, 0.0, 0.0,
        )
    if correction_bits is None:
        correction_bits = correction_relaxed_bits(domain_sizes, n)
    correction = correction_bits / normalizer
    plugin = min(max(total_correlation / normalizer, 0.0), 1.0)
    return SubsetScore(
        members, entropy_sum, entropy_max, joint_entropy,
        total_correlation, normalizer, correction, plugin, plugin - correction,
    )


def score_subset(dataset, members, estimator: str = "relaxed") -> SubsetScore:
    """Score one attribute subset of a dataset with the chosen estimator.

    ``estimator`` is one of ``plugin`` (no correction), ``relaxed`` (the
    production estimator), or the oracle variants ``upper`` / ``exact``
    (restricted to 8 members). The result does not depend on the input
    order of ``members``.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}; expected one of {ESTIMATORS}")
    ordered = _ordered_members(dataset, members)
    n = dataset.n
    part = RowPartition.trivial(n)
    entropy_sum = 0.0
    for i in ordered:
        attr = dataset.attributes[i]
        part = refine_partition(part, attr)
        entropy_sum += attr.entropy
    entropy_max = dataset.attributes[ordered[0]].entropy
    joint = part.joint_entropy()
    sizes = [dataset.attributes[i].domain_size for i in ordered]
    w_norm = entropy_sum - entropy_max

    if estimator == "plugin" or w_norm <= 0.0:
        bits = 0.0
    elif estimator == "relaxed":
        bits = correction_relaxed_bits(sizes, n)
    elif estimator == "upper":
        bits = _correction_upper_bits(dataset, ordered)
    else:
        bits = _correction_exact_bits(dataset, ordered)
    return assemble_score(
        tuple(ordered), entropy_sum, entropy_max, joint, sizes, n,
        correction_bits=bits,
    )
