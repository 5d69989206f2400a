"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

Backend selection: set ``DUCTBARRIER_NUMBA=0`` to force the numpy path or
``DUCTBARRIER_NUMBA=1`` to require numba (import error becomes fatal).
Unset, numba is used when importable.  Both implementations are exported
(``*_numpy``, ``*_numba``) so the benchmark and the equivalence tests can
run them side by side.
"""
from __future__ import annotations

import os

import numpy as np

_CHUNK = 4096  # points per broadcast block in the numpy fallback


def modal_series_numpy(x, z, kx, xoff, amp, c1, e1, zr1, c2, e2, zr2):
    """Sum a two-exponential modal series at scattered points.

    u_j = sum_n amp_n sin(kx_n (x_j - xoff_n)) *
          (c1_n exp(e1_n (z_j - zr1_n)) + c2_n exp(e2_n (zr2_n - z_j)))

    Callers arrange coefficients so every exponent has non-positive real
    part over the region of evaluation; nothing here can overflow.
    """
    out = np.zeros(x.shape[0], dtype=np.complex128)
    for a in range(0, x.shape[0], _CHUNK):
        b = min(a + _CHUNK, x.shape[0])
        xs = x[a:b, None]
        zs = z[a:b, None]
        trans = amp[None, :] * np.sin(kx[None, :] * (xs - xoff[None, :]))
        prof = c1[None, :] * np.exp(e1[None, :] * (zs - zr1[None, :])) \
            + c2[None, :] * np.exp(e2[None, :] * (zr2[None, :] - zs))
        out[a:b] = (trans * prof).sum(axis=1)
    return out


def stencil_triplets_numpy(idxmap, k2h2, j_lo, j_hi, fold_j):
    """COO triplets of the 5-point Helmholtz stencil on free nodes.

    ``idxmap`` maps grid nodes (i, j) to unknown numbers, -1 where the node
    is held at zero.  Rows are emitted for free nodes with j in
    [j_lo, j_hi]; the equation is scaled by h^2 (diagonal k^2 h^2 - 4,
    neighbours +1).  When ``fold_j`` >= 0, the (i, fold_j + 1) neighbour is
    redirected to (i, fold_j - 1), realising a second-order reflecting end.
    """
    ni, nj = idxmap.shape
    jcol = np.broadcast_to(np.arange(nj), (ni, nj))
    active = (idxmap >= 0) & (j_lo <= jcol) & (jcol <= j_hi)
    ai, aj = np.nonzero(active)
    me = idxmap[ai, aj]
    rows = [me]
    cols = [me]
    vals = [np.full(me.size, k2h2 - 4.0)]
    for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        ii = ai + di
        jn = aj + dj
        if fold_j >= 0 and dj == 1:
            jn = np.where(aj == fold_j, fold_j - 1, jn)
        ok = (ii >= 0) & (ii < ni) & (jn >= 0) & (jn < nj)
        nb = idxmap[ii[ok], jn[ok]]
        keep = nb >= 0
        rows.append(me[ok][keep])
        cols.append(nb[keep])
        vals.append(np.ones(int(keep.sum())))
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


_env = os.environ.get("DUCTBARRIER_NUMBA", "").strip().lower()
if _env in ("0", "false", "no", "off"):
    _use_numba = False
elif _env in ("1", "true", "yes", "on"):
    import numba  # noqa: F401  (fail loudly if forced but missing)
    _use_numba = True
else:
    try:
        import numba  # noqa: F401
        _use_numba = True
    except ImportError:
        _use_numba = False

if _use_numba:
    from numba import njit

    @njit(cache=True)
    def modal_series_numba(x, z, kx, xoff, amp, c1, e1, zr1, c2, e2, zr2):
        npts = x.shape[0]
        nmod = kx.shape[0]
        out = np.zeros(npts, dtype=np.complex128)
        for j in range(npts):
            acc = 0.0 + 0.0j
            for n in range(nmod):
                prof = c1[n] * np.exp(e1[n] * (z[j] - zr1[n])) \
                    + c2[n] * np.exp(e2[n] * (zr2[n] - z[j]))
                acc += amp[n] * np.sin(kx[n] * (x[j] - xoff[n])) * prof
            out[j] = acc
        return out

    @njit(cache=True)
    def stencil_triplets_numba(idxmap, k2h2, j_lo, j_hi, fold_j):
        ni, nj = idxmap.shape
        cap = 5 * ni * nj
        rows = np.empty(cap, dtype=np.int64)
        cols = np.empty(cap, dtype=np.int64)
        vals = np.empty(cap, dtype=np.float64)
        cnt = 0
        for j in range(j_lo, j_hi + 1):
            for i in range(ni):
                me = idxmap[i, j]
                if me < 0:
                    continue
                rows[cnt] = me
                cols[cnt] = me
                vals[cnt] = k2h2 - 4.0
                cnt += 1
                for t in range(4):
                    if t == 0:
                        ii, jn = i - 1, j
                    elif t == 1:
                        ii, jn = i + 1, j
                    elif t == 2:
                        ii, jn = i, j - 1
                    else:
                        ii, jn = i, j + 1
                        if fold_j >= 0 and j == fold_j:
                            jn = fold_j - 1
                    if 0 <= ii < ni and 0 <= jn < nj:
                        nb = idxmap[ii, jn]
                        if nb >= 0:
                            rows[cnt] = me
                            cols[cnt] = nb
                            vals[cnt] = 1.0
                            cnt += 1
        return rows[:cnt], cols[:cnt], vals[:cnt]

    modal_series = modal_series_numba
    stencil_triplets = stencil_triplets_numba
    BACKEND = "numba"
else:
    modal_series_numba = None
    stencil_triplets_numba = None
    modal_series = modal_series_numpy
    stencil_triplets = stencil_triplets_numpy
    BACKEND = "numpy"

USING_NUMBA = _use_numba
