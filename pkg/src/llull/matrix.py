"""Llull matrices and their derived quantities.

A Llull matrix stores, for every ordered pair of options (x, y), the
fraction v[x, y] of voters who prefer x to y.  Entries lie in [0, 1],
the diagonal is unused and kept at zero, and v[x, y] + v[y, x] <= 1
(voters who skipped the comparison count in neither entry; the pair
sum is the turnout).
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptySubsetError,
    MatrixFormatError,
    MatrixValidationError,
    SingleOptionWarning,
    UndefinedRatioError,
    ZeroTurnoutError,
)
from .options import OptionSet

VALIDATION_TOL = 1e-12

RATE_KINDS = ("mean_score", "mean_rank", "mean_relative", "strength", "fraction", "eigen")


class LlullMatrix:
    """Immutable matrix of pairwise preference scores."""

    def __init__(self, option_set: OptionSet, scores, *, tol: float = VALIDATION_TOL):
        scores = np.array(scores, dtype=float)
        n = option_set.n
        if scores.shape != (n, n):
            raise MatrixValidationError(
                f"score array has shape {scores.shape}, expected ({n}, {n})"
            )
        if not np.isfinite(scores).all():
            raise MatrixValidationError("score entries must be finite")
        diag = np.abs(np.diagonal(scores))
        if diag.max(initial=0.0) > tol:
            raise MatrixValidationError("diagonal entries must be zero")
        np.fill_diagonal(scores, 0.0)
        low = scores.min(initial=0.0)
        if low < -tol:
            i, j = np.unravel_index(np.argmin(scores), scores.shape)
            raise MatrixValidationError(
                f"negative score {scores[i, j]!r} at ({option_set.labels[i]}, {option_set.labels[j]})"
            )
        np.clip(scores, 0.0, None, out=scores)
        sums = scores + scores.T
        if sums.max(initial=0.0) > 1.0 + tol:
            i, j = np.unravel_index(np.argmax(sums), sums.shape)
            raise MatrixValidationError(
                f"pair sum {sums[i, j]!r} exceeds 1 at ({option_set.labels[i]}, {option_set.labels[j]})"
            )
        # Pairs within tolerance of the bound are rescaled onto it.
        over = sums > 1.0
        if over.any():
            scores[over] /= sums[over]
        scores.setflags(write=False)
        self.option_set = option_set
        self.scores = scores

    @property
    def n(self) -> int:
        return self.option_set.n

    @property
    def labels(self) -> tuple[str, ...]:
        return self.option_set.labels

    def entry(self, x: str, y: str) -> float:
        return float(self.scores[self.option_set.index(x), self.option_set.index(y)])

    def is_vanishing(self) -> bool:
        return float(self.scores.max(initial=0.0)) == 0.0

    def __repr__(self) -> str:
        return f"LlullMatrix({list(self.labels)}, n={self.n})"

    def to_json_dict(self) -> dict:
        return {
            "options": list(self.labels),
            "scores": [[float(x) for x in row] for row in self.scores],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "LlullMatrix":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(payload, dict) or "options" not in payload or "scores" not in payload:
            raise MatrixFormatError('matrix JSON needs "options" and "scores" keys')
        labels = payload["options"]
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise MatrixFormatError('"options" must be a list of strings')
        try:
            option_set = OptionSet(tuple(labels))
        except ValueError as exc:
            raise MatrixFormatError(str(exc)) from exc
        rows = payload["scores"]
        if (
            not isinstance(rows, list)
            or len(rows) != len(labels)
            or any(not isinstance(r, list) or len(r) != len(labels) for r in rows)
        ):
            raise MatrixFormatError('"scores" must be a square row-major number array')
        try:
            return cls(option_set, rows)
        except (TypeError, ValueError) as exc:
            raise MatrixFormatError(f"bad score entries: {exc}") from exc

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["option", *self.labels])
        for label, row in zip(self.labels, self.scores):
            writer.writerow([label, *[repr(float(x)) for x in row]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "LlullMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        rows = [r for r in rows if r]
        if not rows or rows[0][:1] != ["option"]:
            raise MatrixFormatError('matrix CSV needs an "option" header row')
        labels = rows[0][1:]
        if len(rows) != len(labels) + 1:
            raise MatrixFormatError("matrix CSV row count does not match the header")
        try:
            option_set = OptionSet(tuple(labels))
        except ValueError as exc:
            raise MatrixFormatError(str(exc)) from exc
        data = []
        for expected, row in zip(labels, rows[1:]):
            if len(row) != len(labels) + 1 or row[0] != expected:
                raise MatrixFormatError(f"matrix CSV row for {expected!r} is malformed")
            try:
                data.append([float(x) for x in row[1:]])
            except ValueError as exc:
                raise MatrixFormatError(f"bad score entries: {exc}") from exc
        return cls(option_set, data)


@dataclass(frozen=True)
class RateVector:
    """One number per option, tagged with what the numbers mean."""

    option_set: OptionSet
    values: np.ndarray
    kind: str

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        n = self.option_set.n
        if values.shape != (n,):
            raise ValueError(f"rate vector has shape {values.shape}, expected ({n},)")
        if self.kind not in RATE_KINDS:
            raise ValueError(f"unknown rate kind {self.kind!r}")
        if self.kind in ("strength", "fraction"):
            if values.min(initial=0.0) < -VALIDATION_TOL:
                raise ValueError(f"{self.kind} rates must be non-negative")
            if abs(values.sum() - 1.0) > 1e-10:
                raise ValueError(f"{self.kind} rates must sum to 1, got {values.sum()!r}")
        if self.kind == "mean_rank":
            if values.min(initial=1.0) < 1.0 - 1e-9 or values.max(initial=1.0) > n + 1e-9:
                raise ValueError(f"mean ranks must lie in [1, {n}]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def value(self, label: str) -> float:
        return float(self.values[self.option_set.index(label)])


def margins_turnouts(M: LlullMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Margins m = v - v.T and turnouts t = v + v.T; v = (t + m) / 2 recovers M."""
    v = M.scores
    return v - v.T, v + v.T


def relative_scores(M: LlullMatrix) -> LlullMatrix:
    """Scores among the voters who actually compared each pair: q = v / t.

    The result is a complete matrix (q[x, y] + q[y, x] = 1).  Raises
    ZeroTurnoutError when some pair was compared by nobody.
    """
    v = M.scores
    t = v + v.T
    off = ~np.eye(M.n, dtype=bool)
    if (t[off] <= 0.0).any():
        i, j = [int(k[0]) for k in np.nonzero(off & (t <= 0.0))]
        raise ZeroTurnoutError(M.labels[i], M.labels[j])
    q = np.zeros_like(v)
    q[off] = v[off] / t[off]
    return LlullMatrix(M.option_set, q)


def ratios(M: LlullMatrix) -> np.ndarray:
    """Score ratios p[x, y] = v[x, y] / v[y, x] (an alternative encoding)."""
    v = M.scores
    off = ~np.eye(M.n, dtype=bool)
    if (v.T[off] == 0.0).any():
        raise UndefinedRatioError("some reverse score is zero, ratios are undefined")
    p = np.zeros_like(v)
    p[off] = v[off] / v.T[off]
    return p


def mean_preference_scores(M: LlullMatrix) -> RateVector:
    """Row means over the other options: rho[x] = sum(v[x, y], y != x) / (n - 1)."""
    if M.n == 1:
        warnings.warn(
            "mean score of a single option is 1 by convention", SingleOptionWarning, stacklevel=2
        )
        return RateVector(M.option_set, np.array([1.0]), "mean_score")
    rho = M.scores.sum(axis=1) / (M.n - 1)
    return RateVector(M.option_set, rho, "mean_score")


def mean_ranks(M: LlullMatrix) -> RateVector:
    """Mean ranks r[x] = n - (n - 1) * rho[x]; lower means better accepted."""
    rho = mean_preference_scores(M)
    return RateVector(M.option_set, M.n - (M.n - 1) * rho.values, "mean_rank")


def mean_relative_scores(M: LlullMatrix) -> RateVector:
    """Row means of the relative scores; needs every turnout positive."""
    q = relative_scores(M)
    if M.n == 1:
        warnings.warn(
            "mean score of a single option is 1 by convention", SingleOptionWarning, stacklevel=2
        )
        return RateVector(M.option_set, np.array([1.0]), "mean_relative")
    sigma = q.scores.sum(axis=1) / (M.n - 1)
    return RateVector(M.option_set, sigma, "mean_relative")


def restrict(M: LlullMatrix, rows, cols=None):
    """Sub-array of scores; with one subset (or cols=rows) a LlullMatrix over it."""
    rows = list(rows)
    if not rows:
        raise EmptySubsetError("row subset is empty")
    ri = M.option_set.indices(rows)
    if cols is None or list(cols) == rows:
        sub = M.scores[np.ix_(ri, ri)]
        return LlullMatrix(OptionSet(tuple(rows)), sub)
    cols = list(cols)
    if not cols:
        raise EmptySubsetError("column subset is empty")
    ci = M.option_set.indices(cols)
    return M.scores[np.ix_(ri, ci)].copy()
