"""Shared generators and independent oracles for the test suite.

The oracles deliberately use different algorithms than the library:
widest paths by exhaustive path enumeration, components by BFS
reachability, gradients by central differences.
"""

from __future__ import annotations

import itertools
import string

import numpy as np

from llull import Ballot, BallotSet, LlullMatrix, OptionSet, aggregate, indirect_scores


def letters(n: int) -> tuple[str, ...]:
    return tuple(string.ascii_lowercase[:n])


def random_matrix(rng, n, *, t_lo=0.0, t_hi=1.0, u_lo=0.0, u_hi=1.0, zero_prob=0.0):
    """Random valid matrix: each pair splits a turnout t into two scores."""
    scores = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            t = rng.uniform(t_lo, t_hi)
            u = rng.uniform(u_lo, u_hi)
            a, b = t * u, t * (1.0 - u)
            if zero_prob and rng.random() < zero_prob:
                a = 0.0
            if zero_prob and rng.random() < zero_prob:
                b = 0.0
            scores[i, j], scores[j, i] = a, b
    return LlullMatrix(OptionSet(letters(n)), scores)


def random_complete_scores(rng, n) -> np.ndarray:
    """Raw score array with every pair sum exactly 1."""
    q = rng.uniform(0.0, 1.0, size=(n, n))
    scores = np.triu(q, 1)
    scores = scores + np.triu(1.0 - q, 1).T
    return scores


def cyclic_matrix(rng, n):
    """Ring tournament: every option beats the next few around the circle."""
    scores = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            winner, loser = (i, j) if (j - i) <= n // 2 else (j, i)
            hi = rng.uniform(0.55, 0.95)
            scores[winner, loser] = hi
            scores[loser, winner] = rng.uniform(0.05, 1.0 - hi)
    return LlullMatrix(OptionSet(letters(n)), scores)


def _random_tiers(rng, items, tie_prob):
    if not items:
        return []
    tiers, current = [], [items[0]]
    for item in items[1:]:
        if rng.random() < tie_prob:
            current.append(item)
        else:
            tiers.append(tuple(current))
            current = [item]
    tiers.append(tuple(current))
    return tiers


def random_profile(rng, n, *, n_ballots=None, tie_prob=0.3, truncate_prob=0.4):
    opts = letters(n)
    ballots = []
    for _ in range(n_ballots or int(rng.integers(2, 9))):
        size = int(rng.integers(1, n + 1)) if rng.random() < truncate_prob else n
        chosen = [opts[i] for i in rng.permutation(n)[:size]]
        tiers = _random_tiers(rng, chosen, tie_prob)
        ballots.append(Ballot(tuple(tiers), int(rng.integers(1, 4))))
    return BallotSet(OptionSet(opts), tuple(ballots))


def single_choice_profile(rng, n):
    """Every voter picks exactly one option; returns the vote fractions too."""
    opts = letters(n)
    weights = [int(w) for w in rng.integers(0, 10, size=n)]
    if sum(weights) == 0:
        weights[int(rng.integers(0, n))] = 1
    ballots = tuple(Ballot(((opts[i],),), w) for i, w in enumerate(weights) if w > 0)
    fractions = np.array(weights, dtype=float) / sum(weights)
    return BallotSet(OptionSet(opts), ballots), fractions


def planted_unanimity_profile(rng):
    """Profile where every ballot ranks all of X above anything else.

    Every ballot ranks every member of X, so all X scores against
    outsiders are exactly 1.  Returns (profile, members_of_X).
    """
    n = int(rng.integers(3, 8))
    k = int(rng.integers(1, n))
    opts = letters(n)
    inside = [opts[i] for i in sorted(rng.permutation(n)[:k].tolist())]
    outside = [x for x in opts if x not in inside]
    ballots = []
    for _ in range(int(rng.integers(3, 9))):
        members = inside.copy()
        rng.shuffle(members)
        tiers = _random_tiers(rng, members, tie_prob=0.25)
        ranked_out = [z for z in outside if rng.random() < 0.6]
        rng.shuffle(ranked_out)
        tiers += _random_tiers(rng, ranked_out, tie_prob=0.25)
        ballots.append(Ballot(tuple(tiers), int(rng.integers(1, 4))))
    return BallotSet(OptionSet(opts), tuple(ballots)), tuple(inside)


def planted_autonomous_profile(rng):
    """Profile treating a block of options as a unit; returns (profile, block).

    The block occupies consecutive tiers of its own in every ballot, so
    each outsider relates uniformly to all members.
    """
    n_out = int(rng.integers(2, 5))
    block = int(rng.integers(2, 4))
    members = tuple(f"c{i}" for i in range(1, block + 1))
    outsiders = [f"z{i}" for i in range(1, n_out + 1)]
    labels = members + tuple(outsiders)
    ballots = []
    while len(ballots) < int(rng.integers(4, 10)):
        ranked_out = [z for z in outsiders if rng.random() < 0.75]
        rng.shuffle(ranked_out)
        out_tiers = _random_tiers(rng, ranked_out, tie_prob=0.25)
        tiers = out_tiers
        if rng.random() < 0.85:
            sub = list(members)
            rng.shuffle(sub)
            block_tiers = _random_tiers(rng, sub, tie_prob=0.25)
            pos = 0 if rng.random() < 0.6 else int(rng.integers(0, len(out_tiers) + 1))
            tiers = out_tiers[:pos] + block_tiers + out_tiers[pos:]
        if tiers:
            ballots.append(Ballot(tuple(tiers), int(rng.integers(1, 3))))
    return BallotSet(OptionSet(labels), tuple(ballots)), members


def majority_instance(rng):
    """Matrix where every member of a planted X scores above 1/2 cross-pair."""
    n = int(rng.integers(2, 8))
    k = int(rng.integers(1, n))
    M = random_matrix(rng, n, t_lo=0.3, t_hi=1.0)
    scores = M.scores.copy()
    members = sorted(rng.permutation(n)[:k].tolist())
    inside = np.zeros(n, dtype=bool)
    inside[members] = True
    for i in members:
        for j in range(n):
            if not inside[j]:
                hi = rng.uniform(0.52, 0.95)
                scores[i, j] = hi
                scores[j, i] = rng.uniform(0.0, 1.0 - hi)
    return LlullMatrix(M.option_set, scores), [M.labels[i] for i in members]


def improvement_pair(rng):
    """A matrix and a copy where one option's scores only got better."""
    n = int(rng.integers(2, 8))
    M = random_matrix(rng, n, t_lo=0.2, t_hi=1.0)
    i = int(rng.integers(0, n))
    w = M.scores.copy()
    changed = False
    for j in range(n):
        if j == i:
            continue
        if rng.random() < 0.6:
            room = 1.0 - w[i, j] - w[j, i]
            w[i, j] += rng.uniform(0.0, room * 0.95)
            changed = True
        if rng.random() < 0.6:
            w[j, i] -= rng.uniform(0.0, w[j, i])
            changed = True
    if not changed:
        j = (i + 1) % n
        w[j, i] *= 0.5
    return M, LlullMatrix(M.option_set, w), M.labels[i]


def mixed_corpus(rng, count, n_lo=2, n_hi=8):
    """Complete, ballot-generated, and cyclic matrices in rotation."""
    out = []
    while len(out) < count:
        n = int(rng.integers(max(n_lo, 2), n_hi + 1))
        style = len(out) % 3
        if style == 0:
            out.append(random_matrix(rng, n, t_lo=1.0, t_hi=1.0))
        elif style == 1:
            out.append(aggregate(random_profile(rng, n)))
        else:
            out.append(cyclic_matrix(rng, max(n, 3)))
    return out


def tie_free_corpus(rng, count, n_lo=3, n_hi=6, gap=0.02):
    """Matrices whose indirect scores are decisive for every pair."""
    out = []
    while len(out) < count:
        n = int(rng.integers(n_lo, n_hi + 1))
        M = random_matrix(rng, n, t_lo=0.6, t_hi=1.0, u_lo=0.1, u_hi=0.9)
        sigma = indirect_scores(M).sigma
        gaps = np.abs(sigma - sigma.T)[np.triu_indices(n, 1)]
        if (gaps >= gap).all():
            out.append(M)
    return out


_PATH_CACHE: dict[tuple[int, int, int], list[tuple[int, ...]]] = {}


def _simple_paths(n, x, y):
    key = (n, x, y)
    if key not in _PATH_CACHE:
        others = [k for k in range(n) if k not in (x, y)]
        paths = []
        for r in range(len(others) + 1):
            for mid in itertools.permutations(others, r):
                paths.append((x, *mid, y))
        _PATH_CACHE[key] = paths
    return _PATH_CACHE[key]


def oracle_widest_paths(scores: np.ndarray) -> np.ndarray:
    """Max over simple paths of the minimum edge, by full enumeration."""
    n = scores.shape[0]
    out = np.zeros((n, n))
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            best = 0.0
            for path in _simple_paths(n, x, y):
                width = min(scores[a, b] for a, b in zip(path, path[1:]))
                if width > best:
                    best = width
            out[x, y] = best
    return out


def oracle_component_structure(scores: np.ndarray):
    """BFS reachability; returns (classes, dominance, top) as index frozensets."""
    n = scores.shape[0]
    adj = scores > 0.0
    reach = []
    for s in range(n):
        seen = {s}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for v in range(n):
                    if adj[u, v] and v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        reach.append(seen)
    classes = []
    assigned: set[int] = set()
    for i in range(n):
        if i in assigned:
            continue
        cls = frozenset(j for j in range(n) if j in reach[i] and i in reach[j])
        classes.append(cls)
        assigned |= cls
    dominance = set()
    for A in classes:
        for B in classes:
            if A is not B:
                a, b = next(iter(A)), next(iter(B))
                if b in reach[a] and a not in reach[b]:
                    dominance.add((A, B))
    top = None
    for A in classes:
        if all((A, B) in dominance for B in classes if B is not A):
            top = A
            break
    return set(classes), dominance, top


def fd_gradient(f, x, h=1e-6):
    """Central-difference gradient."""
    g = np.zeros_like(x, dtype=float)
    for i in range(len(x)):
        e = np.zeros_like(x, dtype=float)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def chain_matrix(rng, n):
    """Random matrix built directly from the chain construction.

    Margins m_k >= 0 and turnouts satisfying t_k >= t_{k+1} and
    t_k <= t_{k+1} + m_k + m_{k+1} make the result CLC by construction.
    """
    m = rng.uniform(0.0, 0.5, size=n - 1)
    t = np.empty(n - 1)
    t[-1] = rng.uniform(m[-1], 1.0)
    for k in range(n - 3, -1, -1):
        lo = max(m[k], t[k + 1])
        hi = min(1.0, t[k + 1] + m[k] + m[k + 1])
        t[k] = rng.uniform(lo, hi) if lo < hi else lo
    a, b = (t + m) / 2.0, (t - m) / 2.0
    scores = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            scores[i, j] = a[i:j].max()
            scores[j, i] = b[i:j].min()
    return LlullMatrix(OptionSet(letters(n)), scores)
