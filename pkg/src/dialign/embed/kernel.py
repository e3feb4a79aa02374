"""Compiled inner loops for negative-sampling training.

Follows the reference word2vec update rules: a 64-bit linear congruential
generator drives window reduction, subsampling and noise draws, so a given
seed reproduces the same model bit for bit on one thread.
"""

from __future__ import annotations

import numpy as np
from numba import njit

LCG_MUL = np.uint64(25214903917)
LCG_ADD = np.uint64(11)
MAX_EXP = 6.0


@njit(cache=True)
def _next(state):
    return state * LCG_MUL + LCG_ADD


@njit(cache=True)
def _uniform(state):
    # top 24 bits of the low word mapped to [0, 1)
    return ((state >> np.uint64(16)) & np.uint64(0xFFFFFF)) / 16777216.0


@njit(cache=True)
def _draw_negative(state, cum_table):
    r = (state >> np.uint64(16)) % np.uint64(cum_table[-1])
    return np.searchsorted(cum_table, np.int64(r), side="right")


@njit(cache=True)
def _neg_update(l1, word, syn1neg, cum_table, negative, alpha, neu1e, state):
    dim = l1.shape[0]
    for d in range(negative + 1):
        if d == 0:
            target = word
            label = 1.0
        else:
            state = _next(state)
            target = _draw_negative(state, cum_table)
            if target == word:
                continue
            label = 0.0
        f = 0.0
        for k in range(dim):
            f += l1[k] * syn1neg[target, k]
        if f > MAX_EXP:
            g = (label - 1.0) * alpha
        elif f < -MAX_EXP:
            g = label * alpha
        else:
            g = (label - 1.0 / (1.0 + np.exp(-f))) * alpha
        for k in range(dim):
            neu1e[k] += g * syn1neg[target, k]
        for k in range(dim):
            syn1neg[target, k] += g * l1[k]
    return state


@njit(cache=True)
def train_epochs(corpus, offsets, syn0, syn1neg, cum_table, keep_prob, sg, window, negative,
                 start_alpha, min_alpha, epochs, seed):
    """Run all epochs; returns the number of (kept) tokens processed.

    ``corpus`` is a flat int32 array of vocabulary ids, ``offsets`` the start of
    each sentence plus a final end marker.
    """
    dim = syn0.shape[1]
    state = np.uint64(seed) * np.uint64(2654435761) + np.uint64(1)
    total = corpus.shape[0] * epochs
    done = 0
    processed = 0
    neu1 = np.zeros(dim, dtype=np.float32)
    neu1e = np.zeros(dim, dtype=np.float32)
    sent = np.empty(corpus.shape[0] + 1, dtype=np.int32)
    for _ in range(epochs):
        for s in range(offsets.shape[0] - 1):
            a = offsets[s]
            b = offsets[s + 1]
            # subsample
            n = 0
            for i in range(a, b):
                w = corpus[i]
                state = _next(state)
                if keep_prob[w] < 1.0 and keep_prob[w] < _uniform(state):
                    continue
                sent[n] = w
                n += 1
            alpha = start_alpha - (start_alpha - min_alpha) * done / total
            if alpha < min_alpha:
                alpha = min_alpha
            done += b - a
            processed += n
            for pos in range(n):
                word = sent[pos]
                state = _next(state)
                reduced = np.int64(state % np.uint64(window))
                lo = pos - window + reduced
                hi = pos + window - reduced + 1
                if lo < 0:
                    lo = 0
                if hi > n:
                    hi = n
                if sg:
                    for j in range(lo, hi):
                        if j == pos:
                            continue
                        ctx = sent[j]
                        for k in range(dim):
                            neu1e[k] = 0.0
                        state = _neg_update(syn0[ctx], word, syn1neg, cum_table, negative, alpha, neu1e, state)
                        for k in range(dim):
                            syn0[ctx, k] += neu1e[k]
                else:
                    count = 0
                    for k in range(dim):
                        neu1[k] = 0.0
                        neu1e[k] = 0.0
                    for j in range(lo, hi):
                        if j == pos:
                            continue
                        ctx = sent[j]
                        count += 1
                        for k in range(dim):
                            neu1[k] += syn0[ctx, k]
                    if count == 0:
                        continue
                    for k in range(dim):
                        neu1[k] /= count
                    state = _neg_update(neu1, word, syn1neg, cum_table, negative, alpha, neu1e, state)
                    for j in range(lo, hi):
                        if j == pos:
                            continue
                        ctx = sent[j]
                        for k in range(dim):
                            syn0[ctx, k] += neu1e[k]
    return processed
