"""Compiled training kernel: full-sequence forward + backward for one minibatch.

Sequences are padded to the batch maximum and carry their true lengths;
after a sequence ends its cell/hidden state is frozen, which makes the
final-step loss readable at the last padded step and keeps padding out of
every gradient. Weights are packed as W (m+H, 4H) with gate column blocks
ordered [forget, input, candidate, output], plus b (4H,) and Wy (2, H).
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def fwd_bwd(X, lengths, W, b, Wy, y, dW, db, dWy):
    """Mean cross-entropy at each sequence's final step, with BPTT gradients.

    Gradient buffers are accumulated into, so callers zero them first.
    Returns the scalar loss.
    """
    B, L, m = X.shape
    H = Wy.shape[1]
    H4 = 4 * H
    Wh = np.ascontiguousarray(W[m:])            # (H, 4H)
    WhT = np.ascontiguousarray(Wh.T)            # (4H, H)
    F = np.empty((B, L, H))
    I = np.empty((B, L, H))
    G = np.empty((B, L, H))
    O = np.empty((B, L, H))
    C = np.empty((B, L, H))
    Hs = np.empty((B, L, H))
    Hprev = np.zeros((B, L, H))
    dA = np.zeros((B, L, H4))
    dAt = np.empty((B, H4))
    Ax = np.dot(np.ascontiguousarray(X.reshape(B * L, m)),
                np.ascontiguousarray(W[:m])).reshape(B, L, H4)
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    for t in range(L):
        Ah = np.dot(h, Wh)
        for bb in range(B):
            if t < lengths[bb]:
                for j in range(H):
                    af = Ax[bb, t, j] + Ah[bb, j] + b[j]
                    ai = Ax[bb, t, H + j] + Ah[bb, H + j] + b[H + j]
                    ag = Ax[bb, t, 2 * H + j] + Ah[bb, 2 * H + j] + b[2 * H + j]
                    ao = Ax[bb, t, 3 * H + j] + Ah[bb, 3 * H + j] + b[3 * H + j]
                    f = 1.0 / (1.0 + math.exp(-af))
                    i_ = 1.0 / (1.0 + math.exp(-ai))
                    g = math.tanh(ag)
                    o = 1.0 / (1.0 + math.exp(-ao))
                    cc = f * c[bb, j] + i_ * g
                    hh = o * math.tanh(cc)
                    F[bb, t, j] = f
                    I[bb, t, j] = i_
                    G[bb, t, j] = g
                    O[bb, t, j] = o
                    C[bb, t, j] = cc
                    Hs[bb, t, j] = hh
                    c[bb, j] = cc
                    h[bb, j] = hh
            else:
                for j in range(H):
                    C[bb, t, j] = c[bb, j]
                    Hs[bb, t, j] = h[bb, j]
            if t + 1 < L:
                for j in range(H):
                    Hprev[bb, t + 1, j] = h[bb, j]
    # softmax cross-entropy read at each sequence's final valid step; the
    # resulting dL/dh enters the reverse sweep there because frozen steps
    # pass dh through untouched.
    loss = 0.0
    dh = np.zeros((B, H))
    dc = np.zeros((B, H))
    for bb in range(B):
        tf = lengths[bb] - 1
        l0 = 0.0
        l1 = 0.0
        for j in range(H):
            l0 += Wy[0, j] * Hs[bb, tf, j]
            l1 += Wy[1, j] * Hs[bb, tf, j]
        mx = l0 if l0 > l1 else l1
        lse = mx + math.log(math.exp(l0 - mx) + math.exp(l1 - mx))
        loss += lse - (l1 if y[bb] == 1 else l0)
        p0 = math.exp(l0 - lse)
        p1 = math.exp(l1 - lse)
        d0 = (p0 - (1.0 if y[bb] == 0 else 0.0)) / B
        d1 = (p1 - (1.0 if y[bb] == 1 else 0.0)) / B
        for j in range(H):
            dWy[0, j] += d0 * Hs[bb, tf, j]
            dWy[1, j] += d1 * Hs[bb, tf, j]
            dh[bb, j] += d0 * Wy[0, j] + d1 * Wy[1, j]
    loss /= B
    for t in range(L - 1, -1, -1):
        for bb in range(B):
            if t >= lengths[bb]:
                for j in range(H4):
                    dAt[bb, j] = 0.0
                continue
            for j in range(H):
                tc = math.tanh(C[bb, t, j])
                do = dh[bb, j] * tc
                dcj = dc[bb, j] + dh[bb, j] * O[bb, t, j] * (1.0 - tc * tc)
                cprev = C[bb, t - 1, j] if t > 0 else 0.0
                f = F[bb, t, j]
                i_ = I[bb, t, j]
                g = G[bb, t, j]
                o = O[bb, t, j]
                dAt[bb, j] = dcj * cprev * f * (1.0 - f)
                dAt[bb, H + j] = dcj * g * i_ * (1.0 - i_)
                dAt[bb, 2 * H + j] = dcj * i_ * (1.0 - g * g)
                dAt[bb, 3 * H + j] = do * o * (1.0 - o)
                dc[bb, j] = dcj * f
            for j in range(H4):
                dA[bb, t, j] = dAt[bb, j]
        dHp = np.dot(dAt, WhT)
        for bb in range(B):
            if t < lengths[bb]:
                for j in range(H):
                    dh[bb, j] = dHp[bb, j]
    dA2 = np.ascontiguousarray(dA.reshape(B * L, H4))
    X2 = np.ascontiguousarray(X.reshape(B * L, m))
    Hp2 = np.ascontiguousarray(Hprev.reshape(B * L, H))
    dW[:m] += np.dot(X2.T, dA2)
    dW[m:] += np.dot(Hp2.T, dA2)
    for k in range(H4):
        s = 0.0
        for r in range(B * L):
            s += dA2[r, k]
        db[k] += s
    return loss


def warmup():
    """Force JIT compilation with a tiny instance (cached across processes)."""
    X = np.zeros((1, 2, 1))
    lengths = np.array([2], dtype=np.int64)
    W = np.zeros((1 + 2, 8))
    b = np.zeros(8)
    Wy = np.zeros((2, 2))
    y = np.array([0], dtype=np.int64)
    fwd_bwd(X, lengths, W, b, Wy, y, np.zeros_like(W), np.zeros_like(b), np.zeros_like(Wy))
