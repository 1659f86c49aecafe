"""Compiled inner loops for factoid-embedding SGD.

One call processes a whole sampled batch sequentially, factoid by factoid,
so later factoids see earlier row updates exactly like the plain Python
steps do. All gradients for one factoid are evaluated before any of its
rows move. fastmath stays off so runs are bit-reproducible.
"""

import numpy as np
from numba import njit

MAX_NEGATIVES = 1024


@njit(cache=True, fastmath=False)
def _sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@njit(cache=True, fastmath=False)
def _log_sigmoid(x):
    if x >= 0.0:
        return -np.log1p(np.exp(-x))
    return x - np.log1p(np.exp(x))


@njit(cache=True, fastmath=False)
def user_object_batch(U, W, b, objects, subjects, object_rows, negatives, eta, gW, gb):
    """Sequential ascent steps for a batch of user-object factoids.

    Mutates U in place, adds per-factoid projection gradients into gW/gb,
    and returns the summed objective of the batch.
    """
    batch = subjects.shape[0]
    n_neg = negatives.shape[1]
    m_user = U.shape[1]
    m_obj = objects.shape[1]
    c = np.empty(m_user, dtype=np.float64)
    dfdc = np.empty(m_user, dtype=np.float64)
    neg_coef = np.empty(MAX_NEGATIVES, dtype=np.float64)
    total = 0.0
    for t in range(batch):
        i = subjects[t]
        o = object_rows[t]
        for r in range(m_user):
            acc = b[r]
            for q in range(m_obj):
                acc += W[r, q] * objects[o, q]
            c[r] = acc
        x = 0.0
        for r in range(m_user):
            x += U[i, r] * c[r]
        a = _sigmoid(-x)
        total += _log_sigmoid(x)
        for r in range(m_user):
            dfdc[r] = a * U[i, r]
        for k in range(n_neg):
            nk = negatives[t, k]
            xk = 0.0
            for r in range(m_user):
                xk += U[nk, r] * c[r]
            ak = _sigmoid(xk)
            neg_coef[k] = ak
            total += _log_sigmoid(-xk)
            for r in range(m_user):
                dfdc[r] -= ak * U[nk, r]
        for r in range(m_user):
            gb[r] += dfdc[r]
            for q in range(m_obj):
                gW[r, q] += dfdc[r] * objects[o, q]
        for r in range(m_user):
            U[i, r] += eta * a * c[r]
        for k in range(n_neg):
            nk = negatives[t, k]
            ak = neg_coef[k]
            for r in range(m_user):
                U[nk, r] -= eta * ak * c[r]
    return total


@njit(cache=True, fastmath=False)
def user_user_batch(U, W, b, subjects, followees, negatives, eta, gW, gb):
    """Sequential ascent steps for a batch of follows factoids.

    The followee acts as the projected context and receives its chain-rule
    gradient through the projection as well.
    """
    batch = subjects.shape[0]
    n_neg = negatives.shape[1]
    m_user = U.shape[1]
    c = np.empty(m_user, dtype=np.float64)
    dfdc = np.empty(m_user, dtype=np.float64)
    gj = np.empty(m_user, dtype=np.float64)
    neg_coef = np.empty(MAX_NEGATIVES, dtype=np.float64)
    total = 0.0
    for t in range(batch):
        i = subjects[t]
        j = followees[t]
        for r in range(m_user):
            acc = b[r]
            for q in range(m_user):
                acc += W[r, q] * U[j, q]
            c[r] = acc
        x = 0.0
        for r in range(m_user):
            x += U[i, r] * c[r]
        a = _sigmoid(-x)
        total += _log_sigmoid(x)
        for r in range(m_user):
            dfdc[r] = a * U[i, r]
        for k in range(n_neg):
            nk = negatives[t, k]
            xk = 0.0
            for r in range(m_user):
                xk += U[nk, r] * c[r]
            ak = _sigmoid(xk)
            neg_coef[k] = ak
            total += _log_sigmoid(-xk)
            for r in range(m_user):
                dfdc[r] -= ak * U[nk, r]
        for q in range(m_user):
            acc = 0.0
            for r in range(m_user):
                acc += W[r, q] * dfdc[r]
            gj[q] = acc
        for r in range(m_user):
            gb[r] += dfdc[r]
            for q in range(m_user):
                gW[r, q] += dfdc[r] * U[j, q]
        for r in range(m_user):
            U[i, r] += eta * a * c[r]
        for k in range(n_neg):
            nk = negatives[t, k]
            ak = neg_coef[k]
            for r in range(m_user):
                U[nk, r] -= eta * ak * c[r]
        for r in range(m_user):
            U[j, r] += eta * gj[r]
    return total
