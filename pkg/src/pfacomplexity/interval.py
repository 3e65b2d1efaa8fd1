"""Batched evaluation of acceptance probabilities over PFA parameter boxes.

A k-state PFA over b letters with accepting set {0..s-1} is coded by a vector
of ``(k-1) * (1 + b*k)`` free coordinates: ``k - 1`` for the initial
distribution and ``k - 1`` for every row of every matrix.  The last entry of
each of these probability vectors is one minus the others.

Interval results are widened by an a-priori bound on floating point error
(each value is a short sum of products), which keeps them outward rounded.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .core import Pfa

# generous relative bound on accumulated rounding error per step
_REL = 2.0 ** -44
_TINY = np.finfo(float).tiny


def _down(x, mag):
    return x - (mag * _REL + _TINY)


def _up(x, mag):
    return x + (mag * _REL + _TINY)


class ParamSpace:
    """Coordinates for k-state PFAs over ``b`` letters."""

    def __init__(self, k: int, b: int):
        if k < 1 or b < 1:
            raise ValueError("need k >= 1 and b >= 1")
        self.k, self.b = k, b
        self.ngroups = 1 + b * k
        self.dim = (k - 1) * self.ngroups
        G = np.zeros((self.ngroups, k, self.dim))
        for g in range(self.ngroups):
            base = g * (k - 1)
            for j in range(k - 1):
                G[g, j, base + j] = 1.0
                G[g, k - 1, base + j] = -1.0
        self.entry_grad = G

    # -- conversions ------------------------------------------------------------
    def entries(self, theta):
        """Probability vectors (..., ngroups, k) from points (..., dim)."""
        t = np.asarray(theta, dtype=float).reshape(theta.shape[:-1] + (self.ngroups, self.k - 1))
        last = 1.0 - t.sum(axis=-1, keepdims=True)
        return np.concatenate([t, last], axis=-1)

    def to_pfa(self, theta, s: int, exact: bool = True) -> Pfa:
        """PFA for one point; ``exact`` converts the floats to Fractions first."""
        k, b = self.k, self.b
        conv = Fraction if exact else float
        groups = [[conv(float(x)) for x in theta[g * (k - 1):(g + 1) * (k - 1)]] for g in range(self.ngroups)]
        vecs = [tuple(gr) + (1 - sum(gr),) for gr in groups]
        pi = vecs[0]
        P = tuple(tuple(vecs[1 + sigma * k + i] for i in range(k)) for sigma in range(b))
        eta = (1,) * s + (0,) * (k - s)
        return Pfa(pi, P, eta, mode="rational" if exact else "float")

    def from_pfa(self, A: Pfa) -> tuple[np.ndarray, int]:
        """Point and accepting count after moving accepting states first."""
        if A.k != self.k or A.alphabet != self.b:
            raise ValueError("PFA shape does not match this parameter space")
        order = [i for i in range(A.k) if A.eta[i]] + [i for i in range(A.k) if not A.eta[i]]
        vecs = [[A.pi[i] for i in order]]
        for sigma in range(A.alphabet):
            for i in order:
                vecs.append([A.P[sigma][i][j] for j in order])
        theta = np.array([float(x) for v in vecs for x in v[:-1]])
        return theta, sum(A.eta)

    def feasible(self, theta, tol=1e-12):
        e = self.entries(theta)
        return np.all(e >= -tol, axis=(-1, -2))

    def project(self, theta):
        """Clip to [0,1] and rescale groups whose coordinates sum past 1."""
        t = np.clip(np.asarray(theta, dtype=float), 0.0, 1.0)
        shaped = t.reshape(t.shape[:-1] + (self.ngroups, self.k - 1))
        tot = shaped.sum(axis=-1, keepdims=True)
        shaped = np.where(tot > 1.0, shaped / np.maximum(tot, 1e-300), shaped)
        return shaped.reshape(t.shape)

    # -- point evaluation -------------------------------------------------------
    def rho_all(self, theta, n: int, s: int):
        """Float rho of every word of length n for each point: shape (N, b**n).

        Words are indexed in base b with the first letter most significant.
        """
        theta = np.atleast_2d(theta)
        e = self.entries(theta)
        k, b = self.k, self.b
        v = e[:, 0, None, :]
        for _ in range(n):
            nxt = [np.einsum("nwi,nij->nwj", v, e[:, 1 + sig * k:1 + (sig + 1) * k, :]) for sig in range(b)]
            v = np.stack(nxt, axis=2).reshape(v.shape[0], -1, k)
        return v[..., :s].sum(axis=-1)

    def gap_points(self, theta, w, s: int):
        """Float gap of ``w`` at each point."""
        n = len(w)
        r = self.rho_all(theta, n, s)
        idx = word_index(w, self.b)
        rw = r[:, idx].copy()
        r[:, idx] = -np.inf
        return rw - r.max(axis=1)

    # -- box evaluation ---------------------------------------------------------
    def _box_entries(self, lo, hi):
        k = self.k
        tl = lo.reshape(lo.shape[0], self.ngroups, k - 1)
        th = hi.reshape(hi.shape[0], self.ngroups, k - 1)
        sl, sh = tl.sum(axis=-1, keepdims=True), th.sum(axis=-1, keepdims=True)
        last_lo = np.maximum(0.0, _down(1.0 - sh, 1.0 + sh))
        last_hi = np.minimum(1.0, _up(1.0 - sl, 1.0 + sl))
        El = np.concatenate([tl, last_lo], axis=-1)
        Eh = np.concatenate([th, last_hi], axis=-1)
        infeasible = (sl[..., 0] > 1.0 + 1e-15).any(axis=-1)
        return El, Eh, infeasible

    def rho_box(self, lo, hi, n: int, s: int, grad: bool = False):
        """Interval rho (and optionally its gradient) of all words over boxes.

        Returns ``(rlo, rhi, glo, ghi, infeasible)``; the gradient arrays have
        shape (B, b**n, dim) and are None when ``grad`` is false.
        """
        k, b, D = self.k, self.b, self.dim
        El, Eh, infeasible = self._box_entries(lo, hi)
        B = lo.shape[0]
        vl, vh = El[:, None, 0, :], Eh[:, None, 0, :]
        if grad:
            gl = np.broadcast_to(self.entry_grad[0], (B, 1, k, D)).copy()
            gh = gl.copy()
        for _ in range(n):
            parts = []
            for sig in range(b):
                sl = slice(1 + sig * k, 1 + (sig + 1) * k)
                Pl, Ph = El[:, sl, :], Eh[:, sl, :]
                nl = np.einsum("bwi,bij->bwj", vl, Pl)
                nh = np.einsum("bwi,bij->bwj", vh, Ph)
                nl, nh = _down(nl, nh), _up(nh, nh)
                if not grad:
                    parts.append((nl, nh))
                    continue
                GP = self.entry_grad[sl]  # (i, j, D) constants
                # gv_i * P_ij with P_ij >= 0
                a1 = gl[:, :, :, None, :] * Pl[:, None, :, :, None]
                a2 = gl[:, :, :, None, :] * Ph[:, None, :, :, None]
                b1 = gh[:, :, :, None, :] * Pl[:, None, :, :, None]
                b2 = gh[:, :, :, None, :] * Ph[:, None, :, :, None]
                t1l, t1h = np.minimum(a1, a2), np.maximum(b1, b2)
                # v_i * GP_ij with v_i >= 0 and GP constant
                pos = GP >= 0
                c1 = vl[:, :, :, None, None] * GP
                c2 = vh[:, :, :, None, None] * GP
                t2l, t2h = np.where(pos, c1, c2), np.where(pos, c2, c1)
                mag = (np.maximum(np.abs(t1l), np.abs(t1h)) + np.maximum(np.abs(t2l), np.abs(t2h))).sum(axis=2)
                ngl = _down((t1l + t2l).sum(axis=2), mag)
                ngh = _up((t1h + t2h).sum(axis=2), mag)
                parts.append((nl, nh, ngl, ngh))
            W = vl.shape[1]
            vl = np.stack([p[0] for p in parts], axis=2).reshape(B, W * b, k)
            vh = np.stack([p[1] for p in parts], axis=2).reshape(B, W * b, k)
            if grad:
                gl = np.stack([p[2] for p in parts], axis=2).reshape(B, W * b, k, D)
                gh = np.stack([p[3] for p in parts], axis=2).reshape(B, W * b, k, D)
        rl = _down(vl[..., :s].sum(axis=-1), vh[..., :s].sum(axis=-1))
        rh = _up(vh[..., :s].sum(axis=-1), vh[..., :s].sum(axis=-1))
        if not grad:
            return rl, rh, None, None, infeasible
        mag = np.maximum(np.abs(gl[..., :s, :]), np.abs(gh[..., :s, :])).sum(axis=2)
        rgl = _down(gl[..., :s, :].sum(axis=2), mag)
        rgh = _up(gh[..., :s, :].sum(axis=2), mag)
        return rl, rh, rgl, rgh, infeasible

    def feasible_anchor(self, lo, hi):
        """A feasible point inside each box (the centre when that is feasible)."""
        k = self.k
        tl = lo.reshape(lo.shape[0], self.ngroups, k - 1)
        th = hi.reshape(hi.shape[0], self.ngroups, k - 1)
        room = 1.0 - tl.sum(axis=-1, keepdims=True)
        span = (th - tl).sum(axis=-1, keepdims=True)
        lam = np.clip(np.where(span > 0, room / np.maximum(span, 1e-300), 0.5), 0.0, 0.5)
        return (tl + lam * (th - tl)).reshape(lo.shape)

    def gap_upper_box(self, lo, hi, w, s: int):
        """Certified upper bound of gap(w) over the feasible part of each box.

        Takes the better of the plain interval bound and a mean-value form
        around a feasible anchor point, competitor by competitor.
        """
        n = len(w)
        idx = word_index(w, self.b)
        rl, rh, gl, gh, infeasible = self.rho_box(lo, hi, n, s, grad=True)
        c = self.feasible_anchor(lo, hi)
        cl, ch, _, _, _ = self.rho_box(c, c, n, s, grad=False)
        plain = _up(rh[:, idx, None] - rl, rh[:, idx, None] + rh)
        dgl = gl[:, idx, None, :] - gh
        dgh = gh[:, idx, None, :] - gl
        slope = np.maximum(np.abs(dgl), np.abs(dgh))
        reach = np.maximum(c - lo, hi - c)
        spread = (slope * reach[:, None, :]).sum(axis=-1)
        centre = ch[:, idx, None] - cl
        mv = _up(centre + spread, np.abs(centre) + spread + 1.0)
        per_z = np.minimum(plain, mv)
        per_z[:, idx] = np.inf
        ub = np.minimum(per_z.min(axis=1), 1.0)
        ub[infeasible] = -np.inf
        return ub


def word_index(w, b: int) -> int:
    idx = 0
    for x in w:
        idx = idx * b + int(x)
    return idx


class TwoStateBinary:
    """Centred polynomial bounds for 2-state binary PFAs (same coordinates).

    On a box, rho(u) is a polynomial in the scaled offsets t in [-1, 1]^5 of
    (pi_0, P0[0][0], P0[1][0], P1[0][0], P1[1][0]).  Computing it exactly as a
    coefficient tensor lets ``rho(w) - rho(z)`` cancel before anything is
    bounded, which the plain interval form cannot do.
    """

    k, b, dim = 2, 2, 5

    def __init__(self, n: int):
        self.n = n
        shape = (2,) + (n + 1,) * 4
        grids = np.indices(shape)
        odd = np.zeros(shape, dtype=bool)
        for g in grids:
            odd |= (g % 2 == 1)
        self.odd = odd
        self.shape = shape
        # coefficients stay below 3**n in size; this covers float error
        self.slack = 2.0 ** -30 * 3.0 ** n

    def _shift(self, R, axis):
        out = np.zeros_like(R)
        idx_to = [slice(None)] * R.ndim
        idx_from = [slice(None)] * R.ndim
        idx_to[axis] = slice(1, None)
        idx_from[axis] = slice(None, -1)
        out[tuple(idx_to)] = R[tuple(idx_from)]
        return out

    def polys(self, lo, hi):
        """Coefficient tensors of rho for all words of length n: (B, 2**n, ...)."""
        c, r = (lo + hi) / 2, (hi - lo) / 2
        B = lo.shape[0]
        R = np.zeros((B, 1) + self.shape)
        R[:, 0, 0, 0, 0, 0, 0] = c[:, 0]
        R[:, 0, 1, 0, 0, 0, 0] = r[:, 0]
        ax = {0: (3, 4), 1: (5, 6)}  # tensor axes of (p_s, q_s) after (B, W)
        for _ in range(self.n):
            parts = []
            for s in (0, 1):
                ap, aq = ax[s]
                pc, pr = c[:, 1 + 2 * s], r[:, 1 + 2 * s]
                qc, qr = c[:, 2 + 2 * s], r[:, 2 + 2 * s]
                bc = (pc - qc)[:, None, None, None, None, None, None]
                new = bc * R + pr[:, None, None, None, None, None, None] * self._shift(R, ap) \
                    - qr[:, None, None, None, None, None, None] * self._shift(R, aq)
                new[:, :, 0, 0, 0, 0, 0] += qc[:, None]
                unit = [slice(None), slice(None), 0, 0, 0, 0, 0]
                unit[aq] = 1
                new[tuple(unit)] += qr[:, None]
                parts.append(new)
            W = R.shape[1]
            R = np.stack(parts, axis=2).reshape((B, W * 2) + self.shape)
        return R

    def bound(self, P):
        """Upper bound of polynomials over [-1,1]^5 (reduces the last 5 axes)."""
        const = P[..., 0, 0, 0, 0, 0]
        body = np.where(self.odd, np.abs(P), np.maximum(P, 0.0))
        flat = body.reshape(body.shape[:-5] + (-1,))
        return const + flat[..., 1:].sum(axis=-1) - 0.0

    def gap_upper_box(self, lo, hi, w, s: int = 1):
        if len(w) != self.n or s != 1:
            raise ValueError("polynomial bound set up for another length")
        idx = word_index(w, 2)
        R = self.polys(lo, hi)
        D = R[:, idx:idx + 1] - R
        ub = self.bound(D) + self.slack
        ub[:, idx] = np.inf
        return np.minimum(ub.min(axis=1), 1.0)
