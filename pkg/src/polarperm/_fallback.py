"""Pure-Python/numpy versions of the compiled kernels.

Same signatures and bit-exact outputs as ``polarperm._kernels``. The SC and
permutation kernels vectorise across frames and branches; the SCL kernel
vectorises across paths of one frame.
"""
from __future__ import annotations

import numpy as np


def minsum(x, y):
    mag = np.minimum(np.abs(x), np.abs(y))
    return np.where((x < 0) != (y < 0), -mag, mag)


def _sc_rows(alpha: np.ndarray, frozen: np.ndarray, g: int, u0: np.ndarray, leaf, acc: np.ndarray):
    """Tree recursion (f and g updates) on a stack of rows.

    ``alpha`` has shape (R, 2**l); ``frozen`` has shape (R, n) in decode order.
    Returns the partial sums (R, 2**l); the metric is added into ``acc`` (R,)
    leaf by leaf, in decode order.
    """
    width = alpha.shape[1]
    if width == 1:
        y = alpha[:, 0]
        if leaf is not None:
            leaf[:, g] = y
        fz = frozen[:, g].astype(bool)
        bit = np.where(fz, 0, (y <= 0)).astype(np.uint8)
        u0[:, g] = bit
        hit = fz & (y < 0)
        acc[hit] += y[hit]
        return bit[:, None]
    h = width // 2
    left, right = alpha[:, :h], alpha[:, h:]
    b_left = _sc_rows(minsum(left, right), frozen, 2 * g, u0, leaf, acc)
    child = np.where(b_left.astype(bool), right - left, right + left)
    b_right = _sc_rows(child, frozen, 2 * g + 1, u0, leaf, acc)
    return np.concatenate([b_left ^ b_right, b_right], axis=1)


def sc_decode(llr, frozen):
    llr = np.ascontiguousarray(llr, dtype=np.float64)
    n = llr.size
    u0 = np.zeros((1, n), dtype=np.uint8)
    leaf = np.zeros((1, n))
    metric = np.zeros(1)
    x = _sc_rows(llr[None, :], np.asarray(frozen, np.uint8)[None, :], 0, u0, leaf, metric)
    return u0[0], x[0].astype(np.uint8), float(metric[0]), leaf[0]


def perm_decode_batch(llrs, perms, frozen):
    llrs = np.asarray(llrs, dtype=np.float64)
    perms = np.asarray(perms, dtype=np.int64)
    frozen = np.asarray(frozen, dtype=np.uint8)
    nb, n = llrs.shape
    nl = perms.shape[0]
    # rows ordered (frame, branch)
    permuted = llrs[:, perms].reshape(nb * nl, n)
    fz = np.tile(frozen[perms], (nb, 1))
    u0 = np.zeros((nb * nl, n), dtype=np.uint8)
    metric = np.zeros(nb * nl)
    _sc_rows(permuted, fz, 0, u0, None, metric)
    metric = metric.reshape(nb, nl)
    # argmax returns the first maximum: strict ">" in the branch loop
    win = np.argmax(metric, axis=1)
    best = metric[np.arange(nb), win]
    u0 = u0.reshape(nb, nl, n)[np.arange(nb), win]
    uhat = np.zeros((nb, n), dtype=np.uint8)
    rows = np.arange(nb)[:, None]
    uhat[rows, perms[win]] = u0
    return uhat, best, win.astype(np.int64)


def select_survivors(metrics: np.ndarray, cap: int) -> np.ndarray:
    """Mask of the ``cap`` best candidates; ties go to the lower index."""
    metrics = np.asarray(metrics)
    keep = np.zeros(metrics.size, dtype=bool)
    if metrics.size <= cap:
        keep[:] = True
        return keep
    keep[np.lexsort((np.arange(metrics.size), -metrics))[:cap]] = True
    return keep


class _SclPaths:
    """Path-major working state for one SCL decode."""

    def __init__(self, llr, frozen, cap):
        n = llr.size
        self.n = n
        self.m = n.bit_length() - 1
        self.cap = cap
        self.frozen = frozen
        self.alpha = [np.zeros((1, 1 << l)) for l in range(self.m)] + [llr[None, :].copy()]
        self.beta = [np.zeros((1, 1 << l), dtype=np.uint8) for l in range(self.m + 1)]
        self.u = np.zeros((1, n), dtype=np.uint8)
        self.pm = np.zeros(1)

    def _reindex(self, parents):
        self.alpha = [a[parents] for a in self.alpha]
        self.beta = [b[parents] for b in self.beta]
        self.u = self.u[parents]
        self.pm = self.pm[parents]

    def leaf(self, g):
        y = self.alpha[0][:, 0]
        if self.frozen[g]:
            self.u[:, g] = 0
            self.beta[0][:, 0] = 0
            self.pm = self.pm + np.minimum(0.0, y)
            return
        pref = (y <= 0).astype(np.uint8)
        cand = np.empty(2 * y.size)
        cand[0::2] = self.pm
        cand[1::2] = self.pm - np.abs(y)
        keep = select_survivors(cand, self.cap)
        idx = np.flatnonzero(keep)
        parents = idx >> 1
        alt = (idx & 1).astype(np.uint8)
        bits = pref[parents] ^ alt
        self._reindex(parents)
        self.pm = cand[idx]
        self.u[:, g] = bits
        self.beta[0][:, 0] = bits

    def run(self, l=None, g=0):
        if l is None:
            l = self.m
        if l == 0:
            self.leaf(g)
            return
        h = 1 << (l - 1)
        a = self.alpha[l]
        self.alpha[l - 1] = minsum(a[:, :h], a[:, h:])
        self.run(l - 1, 2 * g)
        a = self.alpha[l]
        bl = self.beta[l - 1]
        self.beta[l] = np.concatenate([bl, np.zeros_like(bl)], axis=1)
        self.alpha[l - 1] = np.where(bl.astype(bool), a[:, h:] - a[:, :h], a[:, h:] + a[:, :h])
        self.run(l - 1, 2 * g + 1)
        br = self.beta[l - 1]
        self.beta[l] = np.concatenate([self.beta[l][:, :h] ^ br, br], axis=1)


def scl_decode_batch(llrs, frozen, list_size):
    if list_size < 1:
        raise ValueError("list size must be >= 1")
    llrs = np.asarray(llrs, dtype=np.float64)
    frozen = np.asarray(frozen, dtype=np.uint8)
    nb, n = llrs.shape
    uout = np.zeros((nb, n), dtype=np.uint8)
    xout = np.zeros((nb, n), dtype=np.uint8)
    mout = np.zeros(nb)
    for f in range(nb):
        paths = _SclPaths(llrs[f], frozen, list_size)
        paths.run()
        best = int(np.argmax(paths.pm))
        uout[f] = paths.u[best]
        xout[f] = paths.beta[paths.m][best]
        mout[f] = paths.pm[best]
    return uout, xout, mout
