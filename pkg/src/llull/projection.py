"""Projection of an arbitrary Llull matrix onto one with CLC structure.

The construction works on the widest-path closure of the input:

1. order the options so that indirect dominance (sigma_xy > sigma_yx)
   is respected, breaking ties by mean preference score and then label;
2. give each consecutive pair the margin min over crossing pairs of
   the indirect-score differences (never negative for this order);
3. give each consecutive pair the input's turnout, lifted to at least
   every later margin and repaired so that turnouts never increase
   along the order (C2) and each chain link overlaps the next
   (C1: t_k <= t_{k+1} + m_k + m_{k+1});
4. generate the full matrix from the consecutive pairs by the chain
   rules: upper scores compose by max, lower scores by min.

Steps 2-4 reproduce a matrix that already has CLC structure, which
makes the projection idempotent.  Every output is passed through
check_clc before being returned; a failure raises instead of
returning a bad matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalError, ProjectionPostconditionViolatedError
from .matrix import LlullMatrix, mean_preference_scores
from .structure import (
    STRUCT_TOL,
    AdmissibleOrder,
    check_clc,
    components,
    indirect_scores,
)

FIXED_POINT_TOL = 1e-12
REPAIR_SWEEP_CAP = 100
COUPLING_NOISE = 1e-11


@dataclass(frozen=True)
class ProjectionResult:
    matrix: LlullMatrix
    order: AdmissibleOrder
    fixed_point: bool


@dataclass(frozen=True)
class ProjectionChecks:
    ok: bool
    issues: tuple[str, ...]


def _dominance_order(sigma: np.ndarray, rho: np.ndarray) -> list[int]:
    """Topological selection on the strict dominance of indirect scores.

    Dominance of widest-path values is transitive, so an unbeaten
    candidate always exists; hitting none signals a broken closure.
    """
    n = len(rho)
    beats = sigma > sigma.T
    remaining = list(range(n))
    order: list[int] = []
    while remaining:
        unbeaten = [i for i in remaining if not any(beats[j, i] for j in remaining)]
        if not unbeaten:
            raise InternalError("indirect-score dominance is not acyclic")
        pick = min(unbeaten, key=lambda i: (-rho[i], i))
        order.append(pick)
        remaining.remove(pick)
    return order


def _chain_generate(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full matrix from consecutive pair scores, by running max/min.

    Pure selections: no arithmetic happens here, so chain identities
    hold exactly in floating point.
    """
    n = len(a) + 1
    out = np.zeros((n, n))
    for i in range(n - 1):
        hi = a[i]
        lo = b[i]
        out[i, i + 1] = hi
        out[i + 1, i] = lo
        for j in range(i + 2, n):
            hi = max(hi, a[j - 1])
            lo = min(lo, b[j - 1])
            out[i, j] = hi
            out[j, i] = lo
    return out


def clc_project(M: LlullMatrix, tol: float = STRUCT_TOL) -> ProjectionResult:
    n = M.n
    if n == 1:
        return ProjectionResult(M, AdmissibleOrder(M.labels), True)
    sigma = indirect_scores(M).sigma
    rho = M.scores.sum(axis=1) / (n - 1)
    perm = _dominance_order(sigma, rho)
    D = sigma[np.ix_(perm, perm)]
    D = D - D.T
    margins = np.empty(n - 1)
    for k in range(n - 1):
        margins[k] = max(0.0, float(D[: k + 1, k + 1 :].min()))
    raw = np.array(
        [
            M.scores[perm[k], perm[k + 1]] + M.scores[perm[k + 1], perm[k]]
            for k in range(n - 1)
        ]
    )
    suffix = np.maximum.accumulate(margins[::-1])[::-1]
    turnouts = np.minimum(1.0, np.maximum(raw, suffix))
    # One C1 pass (right to left) then one C2 pass (left to right)
    # provably reaches a fixed point; the loop is a safety bound.
    for _ in range(REPAIR_SWEEP_CAP):
        changed = False
        for k in range(n - 3, -1, -1):
            bound = turnouts[k + 1] + margins[k] + margins[k + 1]
            if turnouts[k] > bound:
                turnouts[k] = bound
                changed = True
        for k in range(n - 2):
            if turnouts[k + 1] > turnouts[k]:
                turnouts[k + 1] = turnouts[k]
                changed = True
        if not changed:
            break
    a = (turnouts + margins) / 2.0
    b = (turnouts - margins) / 2.0
    chained = _chain_generate(a, b)
    scores = np.zeros((n, n))
    scores[np.ix_(perm, perm)] = chained
    matrix = LlullMatrix(M.option_set, scores)
    order = AdmissibleOrder(tuple(M.labels[i] for i in perm))
    verdict = check_clc(matrix, order, tol)
    if not verdict.ok:
        witness = verdict.witnesses[0] if verdict.witnesses else None
        raise ProjectionPostconditionViolatedError(
            f"constructed matrix failed check_clc: {witness}"
        )
    if not matrix.is_vanishing():
        report = components(matrix)
        top = report.top_dominant
        if top is None:
            raise ProjectionPostconditionViolatedError(
                "non-vanishing output has no top dominant component"
            )
        rows = matrix.option_set.indices(report.components[top])
        block = matrix.scores[rows, :]
        block_ok = all(
            (np.delete(block[i], rows[i]) > 0.0).all() for i in range(len(rows))
        )
        if not block_ok:
            raise ProjectionPostconditionViolatedError(
                "top dominant component lacks strictly positive scores"
            )
    fixed_point = bool(np.abs(matrix.scores - M.scores).max(initial=0.0) <= FIXED_POINT_TOL)
    return ProjectionResult(matrix, order, fixed_point)


def verify_projection(
    M: LlullMatrix, R: ProjectionResult, tol: float = STRUCT_TOL
) -> ProjectionChecks:
    """Consistency checks on a projection result.

    Flags only decisive contradictions: mean-score gaps and margins of
    a CLC matrix bound each other within a factor N-1, so a violation
    of either bound beyond rounding noise is a genuine defect, while
    sub-tolerance discrepancies are not.
    """
    issues: list[str] = []
    out = R.matrix
    n = out.n
    verdict = check_clc(out, R.order, tol)
    if not verdict.ok:
        bad = [c for c, passed in verdict.conditions.items() if not passed]
        issues.append(f"check_clc failed: {', '.join(bad)}")
    rho = mean_preference_scores(out).values if n > 1 else np.array([1.0])
    idx = out.option_set.indices(R.order.labels)
    ordered_rho = rho[idx]
    for k in range(n - 1):
        if ordered_rho[k + 1] > ordered_rho[k] + tol:
            issues.append(
                f"order not sorted by mean score at {R.order.labels[k]!r}"
            )
    P = out.scores[np.ix_(idx, idx)]
    for i in range(n):
        for j in range(i + 1, n):
            gap = ordered_rho[i] - ordered_rho[j]
            margin = P[i, j] - P[j, i]
            if gap > (n - 1) * margin + COUPLING_NOISE:
                issues.append(
                    f"mean-score gap without margin: ({R.order.labels[i]}, {R.order.labels[j]})"
                )
            elif margin > (n - 1) * gap + COUPLING_NOISE:
                issues.append(
                    f"margin without mean-score gap: ({R.order.labels[i]}, {R.order.labels[j]})"
                )
    sigma = indirect_scores(out).sigma
    drift = float(np.abs(sigma - out.scores).max(initial=0.0))
    if drift > FIXED_POINT_TOL:
        issues.append(f"indirect scores drift from the matrix by {drift!r}")
    if not out.is_vanishing():
        report = components(out)
        if report.top_dominant is None:
            issues.append("no top dominant component")
        else:
            members = set(report.components[report.top_dominant])
            inside = [rho[out.option_set.index(x)] for x in members]
            outside = [
                rho[out.option_set.index(x)] for x in out.labels if x not in members
            ]
            if outside and min(inside) < max(outside) - tol:
                issues.append("top component mean scores not above the rest")
    return ProjectionChecks(not issues, tuple(issues))
