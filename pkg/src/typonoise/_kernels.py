"""Per-character corruption decisions.

Two interchangeable implementations consume the same pre-drawn uniforms and
must agree exactly: a numba loop and a vectorized numpy path. Set
``TYPONOISE_DISABLE_NUMBA=1`` to force the numpy path.

Uniform columns per position: 0-4 category order keys (substitution,
insertion, replication, deletion, transposition), 5 substitution trial,
6/7 insertion before/after trials, 8 replication, 9 deletion,
10 transposition, 11 candidate draw.
"""

from __future__ import annotations

import os

import numpy as np

N_UNIFORMS = 12

NONE, SUB, INS_BEFORE, INS_AFTER, REPL, DEL, TRANS, TRANS_SECOND = range(8)

_K_SUB, _K_INS, _K_REPL, _K_DEL, _K_TRANS = range(5)


def _numba_wanted() -> bool:
    return os.environ.get("TYPONOISE_DISABLE_NUMBA", "").lower() not in ("1", "true", "yes")


try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAVE_NUMBA = numba is not None


def _sample_py(cdf_row, u):
    j = 0
    while cdf_row[j] <= u:
        j += 1
    return j


_sample = numba.njit(cache=True)(_sample_py) if HAVE_NUMBA else _sample_py


def _decide_loop(codes, trans_ok, u, q_sub, q_ib, q_ia, q_rep, q_del, q_tr, cdf_sub, cdf_ib, cdf_ia):
    n = codes.shape[0]
    cat = np.zeros(n, dtype=np.int8)
    detail = np.full(n, -1, dtype=np.int64)
    i = 0
    while i < n:
        c = codes[i]
        if c < 0:
            i += 1
            continue
        best = -1
        best_key = 2.0
        row = u[i]
        if row[5] < q_sub[c] and row[_K_SUB] < best_key:
            best, best_key = SUB, row[_K_SUB]
        if row[6] < q_ib[c] or row[7] < q_ia[c]:
            if row[_K_INS] < best_key:
                best_key = row[_K_INS]
                best = INS_BEFORE if row[6] < q_ib[c] else INS_AFTER
        if row[8] < q_rep[c] and row[_K_REPL] < best_key:
            best, best_key = REPL, row[_K_REPL]
        if row[9] < q_del[c] and row[_K_DEL] < best_key:
            best, best_key = DEL, row[_K_DEL]
        if trans_ok[i] and row[10] < q_tr[c, codes[i + 1]] and row[_K_TRANS] < best_key:
            best, best_key = TRANS, row[_K_TRANS]
        if best == SUB:
            cat[i] = SUB
            detail[i] = _sample(cdf_sub[c], row[11])
        elif best == INS_BEFORE:
            cat[i] = INS_BEFORE
            detail[i] = _sample(cdf_ib[c], row[11])
        elif best == INS_AFTER:
            cat[i] = INS_AFTER
            detail[i] = _sample(cdf_ia[c], row[11])
        elif best == REPL:
            cat[i] = REPL
        elif best == DEL:
            cat[i] = DEL
        elif best == TRANS:
            cat[i] = TRANS
            cat[i + 1] = TRANS_SECOND
            i += 1
        i += 1
    return cat, detail


def _pick(cdf, rows, u):
    # first column whose cdf exceeds u; rows that fire always end at exactly 1.0
    return (cdf[rows] <= u[:, None]).sum(axis=1)


def _decide_numpy(codes, trans_ok, u, q_sub, q_ib, q_ia, q_rep, q_del, q_tr, cdf_sub, cdf_ib, cdf_ia):
    n = codes.shape[0]
    cat = np.zeros(n, dtype=np.int8)
    detail = np.full(n, -1, dtype=np.int64)
    alpha = codes >= 0
    c = np.where(alpha, codes, 0)
    nxt = np.zeros(n, dtype=np.int64)
    nxt[:-1] = np.where(trans_ok[:-1], codes[1:], 0)

    ib = u[:, 6] < q_ib[c]
    fired = np.stack(
        [
            u[:, 5] < q_sub[c],
            ib | (u[:, 7] < q_ia[c]),
            u[:, 8] < q_rep[c],
            u[:, 9] < q_del[c],
            trans_ok & (u[:, 10] < q_tr[c, nxt]),
        ],
        axis=1,
    )
    fired &= alpha[:, None]
    keys = np.where(fired, u[:, :5], 2.0)
    winner = keys.argmin(axis=1)
    any_fired = fired.any(axis=1)

    # a transposition swallows the next position; chained candidates alternate
    t = any_fired & (winner == _K_TRANS)
    idx = np.arange(n)
    prev_t = np.zeros(n, dtype=bool)
    prev_t[1:] = t[:-1]
    run_start = np.maximum.accumulate(np.where(t & ~prev_t, idx, 0))
    t_eff = t & ((idx - run_start) % 2 == 0)
    skipped = np.zeros(n, dtype=bool)
    skipped[1:] = t_eff[:-1]
    active = any_fired & ~skipped

    cat[active & (winner == _K_REPL)] = REPL
    cat[active & (winner == _K_DEL)] = DEL
    cat[t_eff] = TRANS
    cat[skipped] = TRANS_SECOND

    sel = np.flatnonzero(active & (winner == _K_SUB))
    cat[sel] = SUB
    detail[sel] = _pick(cdf_sub, c[sel], u[sel, 11])
    ins = active & (winner == _K_INS)
    for mask, code, cdf in ((ins & ib, INS_BEFORE, cdf_ib), (ins & ~ib, INS_AFTER, cdf_ia)):
        sel = np.flatnonzero(mask)
        cat[sel] = code
        detail[sel] = _pick(cdf, c[sel], u[sel, 11])
    return cat, detail


decide_python = _decide_loop
decide_numpy = _decide_numpy
decide_numba = numba.njit(cache=True)(_decide_loop) if HAVE_NUMBA else None


def backend() -> str:
    return "numba" if (HAVE_NUMBA and _numba_wanted()) else "numpy"


def decide(*args):
    """Dispatch to the active backend."""
    if backend() == "numba":
        return decide_numba(*args)
    return decide_numpy(*args)


# ---------------------------------------------------------------------------
# restricted Damerau-Levenshtein distance from one query to many words


def _osa_many_loop(query, words, lengths):
    n = query.shape[0]
    w_count, width = words.shape
    out = np.empty(w_count, dtype=np.int64)
    prev2 = np.empty(width + 1, dtype=np.int64)
    prev = np.empty(width + 1, dtype=np.int64)
    cur = np.empty(width + 1, dtype=np.int64)
    for w in range(w_count):
        m = lengths[w]
        word = words[w]
        for j in range(m + 1):
            prev[j] = j
        for i in range(1, n + 1):
            cur[0] = i
            qi = query[i - 1]
            for j in range(1, m + 1):
                wj = word[j - 1]
                v = prev[j - 1] + (1 if qi != wj else 0)
                if prev[j] + 1 < v:
                    v = prev[j] + 1
                if cur[j - 1] + 1 < v:
                    v = cur[j - 1] + 1
                if i > 1 and j > 1 and qi == word[j - 2] and query[i - 2] == wj and qi != wj:
                    if prev2[j - 2] + 1 < v:
                        v = prev2[j - 2] + 1
                cur[j] = v
            for j in range(m + 1):
                prev2[j] = prev[j]
                prev[j] = cur[j]
        out[w] = prev[m]
    return out


def _osa_many_numpy(query, words, lengths):
    n = query.shape[0]
    w_count, width = words.shape
    cols = np.arange(width + 1)
    prev = np.broadcast_to(cols[:, None], (width + 1, w_count)).astype(np.int64)
    prev2 = prev.copy()
    wt = words.T
    for i in range(1, n + 1):
        qi = query[i - 1]
        cur = np.empty_like(prev)
        cur[0] = i
        for j in range(1, width + 1):
            wj = wt[j - 1]
            v = np.minimum(prev[j - 1] + (wj != qi), prev[j] + 1)
            v = np.minimum(v, cur[j - 1] + 1)
            if i > 1 and j > 1:
                swap = (wt[j - 2] == qi) & (wj == query[i - 2]) & (wj != qi)
                v = np.where(swap, np.minimum(v, prev2[j - 2] + 1), v)
            cur[j] = v
        prev2, prev = prev, cur
    if n == 0:
        return lengths.astype(np.int64)
    return prev[lengths, np.arange(w_count)]


osa_many_numpy = _osa_many_numpy
osa_many_numba = numba.njit(cache=True)(_osa_many_loop) if HAVE_NUMBA else None


def osa_many(query, words, lengths):
    if backend() == "numba":
        return osa_many_numba(query, words, lengths)
    return osa_many_numpy(query, words, lengths)
