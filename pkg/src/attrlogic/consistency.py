"""Batch consistency checking.

``compile`` turns a RuleSet into an immutable vectorized evaluator built on
per-rule column masks over the binarized label matrix; it must agree with the
direct interpreter ``check_naive`` on every input. A vector is *impossible*
when it violates a mutex, an implication, or an exclusive group, and
*incomplete* when an exhaustive group has no positive member; the two can
co-occur on one row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, EmptyBatchError
from .schema import AttributeSchema, Group, Implication, Mutex, RuleSet


@dataclass
class LabelBatch:
    """N rows of per-attribute values in [0, 1] bound to a schema.

    Values at or above ``threshold`` binarize to positive. ``penalized`` is an
    optional N x M mask set by metrics.enforce_logic; it never round-trips
    through files.
    """

    schema: AttributeSchema
    values: np.ndarray
    threshold: float = 0.5
    row_ids: tuple[str, ...] | None = None
    penalized: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise DimensionMismatchError(f"values must be 2-D, got shape {self.values.shape}")
        if self.values.shape[1] != len(self.schema):
            raise DimensionMismatchError(
                f"{self.values.shape[1]} columns for a {len(self.schema)}-attribute schema"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("label values must be finite")
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise ValueError("label values must lie in [0, 1]")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if self.row_ids is not None:
            self.row_ids = tuple(self.row_ids)
            if len(self.row_ids) != self.values.shape[0]:
                raise DimensionMismatchError("row_ids length does not match row count")

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.values.shape[1]

    @property
    def binarized(self) -> np.ndarray:
        """Boolean N x M view: value >= threshold."""
        return self.values >= self.threshold

    def replace_values(self, values: np.ndarray) -> "LabelBatch":
        return LabelBatch(self.schema, values, threshold=self.threshold, row_ids=self.row_ids)


@dataclass(frozen=True)
class ConsistencyVerdict:
    """Per-vector verdict; rule identifiers are declaration-order ordinals."""

    consistent: bool
    impossible_rules: tuple[int, ...] = ()
    incomplete_groups: tuple[int, ...] = ()


@dataclass(frozen=True)
class BatchVerdicts:
    """Vectorized verdicts for a whole batch.

    ``violated_impossible`` and ``violated_incomplete`` hold one
    (rule ordinal, per-row bool mask) entry per evaluated condition, sorted
    by ordinal.
    """

    impossible: np.ndarray  # bool per row
    incomplete: np.ndarray  # bool per row
    violated_impossible: tuple[tuple[int, np.ndarray], ...]
    violated_incomplete: tuple[tuple[int, np.ndarray], ...]

    @property
    def failed(self) -> np.ndarray:
        return self.impossible | self.incomplete

    def row_verdict(self, i: int) -> ConsistencyVerdict:
        imp = tuple(ordinal for ordinal, bad in self.violated_impossible if bad[i])
        inc = tuple(ordinal for ordinal, bad in self.violated_incomplete if bad[i])
        return ConsistencyVerdict(consistent=not imp and not inc, impossible_rules=imp, incomplete_groups=inc)


@dataclass(frozen=True)
class FailedRatioReport:
    n_total: int
    n_impossible: int
    n_incomplete: int
    n_failed: int

    @property
    def ratio(self) -> float:
        return self.n_failed / self.n_total


@dataclass(frozen=True)
class CompiledChecker:
    """Immutable mask-based evaluator; safe for concurrent use."""

    rules: RuleSet
    _mutex_like: tuple[tuple[int, np.ndarray], ...] = field(repr=False, default=())
    _implications: tuple[tuple[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray], ...] = field(
        repr=False, default=()
    )
    _exhaustive: tuple[tuple[int, np.ndarray], ...] = field(repr=False, default=())

    @property
    def schema(self) -> AttributeSchema:
        return self.rules.schema

    def check_matrix(self, binary: np.ndarray) -> BatchVerdicts:
        """Evaluate every rule over an N x M boolean matrix."""
        n, m = binary.shape
        if m != len(self.schema):
            raise DimensionMismatchError(f"{m} columns for a {len(self.schema)}-attribute schema")
        impossible = np.zeros(n, dtype=bool)
        incomplete = np.zeros(n, dtype=bool)
        violated_imp: list[tuple[int, np.ndarray]] = []
        violated_inc: list[tuple[int, np.ndarray]] = []
        for ordinal, members in self._mutex_like:
            bad = binary[:, members].sum(axis=1) >= 2
            impossible |= bad
            violated_imp.append((ordinal, bad))
        for ordinal, ant_pos, ant_neg, con_pos, con_neg in self._implications:
            triggered = binary[:, ant_pos].all(axis=1) & (~binary[:, ant_neg]).all(axis=1)
            satisfied = binary[:, con_pos].all(axis=1) & (~binary[:, con_neg]).all(axis=1)
            bad = triggered & ~satisfied
            impossible |= bad
            violated_imp.append((ordinal, bad))
        for ordinal, members in self._exhaustive:
            bad = ~binary[:, members].any(axis=1)
            incomplete |= bad
            violated_inc.append((ordinal, bad))
        violated_imp.sort(key=lambda item: item[0])
        return BatchVerdicts(
            impossible=impossible,
            incomplete=incomplete,
            violated_impossible=tuple(violated_imp),
            violated_incomplete=tuple(violated_inc),
        )

    def check_batch(self, batch: LabelBatch) -> BatchVerdicts:
        if batch.schema.names != self.schema.names:
            raise DimensionMismatchError("batch schema does not match checker schema")
        return self.check_matrix(batch.binarized)


def compile(rules: RuleSet) -> CompiledChecker:  # noqa: A001 - spec operation name
    """Precompute per-rule index masks for fast batch evaluation."""
    mutex_like: list[tuple[int, np.ndarray]] = []
    implications: list[tuple[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = []
    exhaustive: list[tuple[int, np.ndarray]] = []
    for ordinal, rule in enumerate(rules.rules):
        if isinstance(rule, Mutex):
            mutex_like.append((ordinal, np.asarray(rule.members, dtype=np.intp)))
        elif isinstance(rule, Group):
            members = np.asarray(rule.members, dtype=np.intp)
            if rule.exclusive:
                mutex_like.append((ordinal, members))
            if rule.exhaustive:
                exhaustive.append((ordinal, members))
        elif isinstance(rule, Implication):
            implications.append(
                (
                    ordinal,
                    np.asarray([l.attr for l in rule.antecedent if l.positive], dtype=np.intp),
                    np.asarray([l.attr for l in rule.antecedent if not l.positive], dtype=np.intp),
                    np.asarray([l.attr for l in rule.consequent if l.positive], dtype=np.intp),
                    np.asarray([l.attr for l in rule.consequent if not l.positive], dtype=np.intp),
                )
            )
    return CompiledChecker(
        rules=rules,
        _mutex_like=tuple(mutex_like),
        _implications=tuple(implications),
        _exhaustive=tuple(exhaustive),
    )


def _as_binary_row(vector, m: int) -> np.ndarray:
    row = np.asarray(vector)
    if row.shape != (m,):
        raise DimensionMismatchError(f"vector of length {row.shape} for {m} attributes")
    return row.astype(bool)


def check(checker: CompiledChecker, vector) -> ConsistencyVerdict:
    """Verdict for a single binary label row."""
    row = _as_binary_row(vector, len(checker.schema))
    return checker.check_matrix(row[None, :]).row_verdict(0)


def check_naive(rules: RuleSet, vector) -> ConsistencyVerdict:
    """Direct single-row interpretation of the RuleSet; the oracle for compile/check."""
    row = _as_binary_row(vector, len(rules.schema))
    impossible: list[int] = []
    incomplete: list[int] = []
    for ordinal, rule in enumerate(rules.rules):
        if isinstance(rule, Mutex):
            if sum(bool(row[i]) for i in rule.members) >= 2:
                impossible.append(ordinal)
        elif isinstance(rule, Group):
            positives = sum(bool(row[i]) for i in rule.members)
            if rule.exclusive and positives >= 2:
                impossible.append(ordinal)
            if rule.exhaustive and positives == 0:
                incomplete.append(ordinal)
        else:
            triggered = all(bool(row[l.attr]) == l.positive for l in rule.antecedent)
            satisfied = all(bool(row[l.attr]) == l.positive for l in rule.consequent)
            if triggered and not satisfied:
                impossible.append(ordinal)
    return ConsistencyVerdict(
        consistent=not impossible and not incomplete,
        impossible_rules=tuple(impossible),
        incomplete_groups=tuple(incomplete),
    )


def failed_ratio(checker: CompiledChecker, batch: LabelBatch) -> FailedRatioReport:
    """Count rows with any violation; a doubly-failing row counts once in n_failed."""
    if len(batch) == 0:
        raise EmptyBatchError("cannot audit an empty batch")
    verdicts = checker.check_batch(batch)
    return FailedRatioReport(
        n_total=len(batch),
        n_impossible=int(verdicts.impossible.sum()),
        n_incomplete=int(verdicts.incomplete.sum()),
        n_failed=int(verdicts.failed.sum()),
    )
