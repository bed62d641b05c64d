"""Array kernels: D4* quantization, Hamilton products, wrapped-distance search.

Every hot kernel exists twice, ``*_numba`` (compiled when numba is present)
and ``*_numpy``.  The unsuffixed public name is bound according to
:data:`hurwitz_pia._accel.USE_NUMBA`.

Conventions
-----------
Hurwitz points travel as int64 arrays of *doubled* coordinates, last axis of
length 4: ``d`` stands for the quaternion ``(d0 + d1 i + d2 j + d3 k) / 2``.
Real (channel) quaternions travel as float64 arrays with undoubled coordinates.

Tie rule of every exact quantizer: among nearest Hurwitz points, the one whose
doubled quadruple is lexicographically smallest.
"""

from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit

INT_LIMIT = 1 << 62


# ---------------------------------------------------------------------------
# exact integer arithmetic on doubled coordinates


def hamilton_raw(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product of integer quadruples, broadcasting over leading axes."""
    a0, a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    b0, b1, b2, b3 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def _check_magnitude(*arrays: np.ndarray, limit: int = 1 << 30) -> None:
    for arr in arrays:
        if arr.size and int(np.abs(arr).max()) >= limit:
            raise OverflowError("doubled coordinates too large for the int64 carrier")


def hamilton_doubled(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of Hurwitz points given and returned in doubled coordinates."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    _check_magnitude(a, b)
    raw = hamilton_raw(a, b)
    if np.any(raw & 1):
        raise ArithmeticError("odd Hamilton product: operands violate the Hurwitz parity rule")
    return raw >> 1


def conj_doubled(a: np.ndarray) -> np.ndarray:
    out = -np.asarray(a, dtype=np.int64)
    out[..., 0] = -out[..., 0]
    return out


def hurwitz_parity_ok(d: np.ndarray) -> np.ndarray:
    d = np.asarray(d, dtype=np.int64)
    par = d & 1
    return np.all(par == par[..., :1], axis=-1)


# ---------------------------------------------------------------------------
# exact D4* quantizer: nearest Hurwitz point to num/den


def quantize_rational_numpy(num: np.ndarray, den: int) -> np.ndarray:
    num = np.asarray(num, dtype=np.int64)
    den = int(den)
    if den <= 0:
        raise ValueError("denominator must be positive")
    two_den = 2 * den
    # integer candidate: ceil(x - 1/2); half candidate: ceil(x - 1) + 1/2
    k = -((den - 2 * num) // two_den)
    m = -((den - num) // den)
    e_int = 2 * num - k * two_den
    e_half = 2 * num - (2 * m + 1) * den
    s_int = (e_int * e_int).sum(axis=-1)
    s_half = (e_half * e_half).sum(axis=-1)
    d_int = 2 * k
    d_half = 2 * m + 1
    take_half = (s_half < s_int) | ((s_half == s_int) & (d_half[..., 0] < d_int[..., 0]))
    return np.where(take_half[..., None], d_half, d_int)


@njit(cache=True)
def _quantize_rational_rows(num, den, out):
    two_den = 2 * den
    for r in range(num.shape[0]):
        s_int = 0
        s_half = 0
        for c in range(4):
            x = num[r, c]
            k = -((den - 2 * x) // two_den)
            m = -((den - x) // den)
            e_i = 2 * x - k * two_den
            e_h = 2 * x - (2 * m + 1) * den
            s_int += e_i * e_i
            s_half += e_h * e_h
        k0 = -((den - 2 * num[r, 0]) // two_den)
        m0 = -((den - num[r, 0]) // den)
        half = s_half < s_int or (s_half == s_int and 2 * m0 + 1 < 2 * k0)
        for c in range(4):
            x = num[r, c]
            if half:
                out[r, c] = 2 * (-((den - x) // den)) + 1
            else:
                out[r, c] = 2 * (-((den - 2 * x) // two_den))


def quantize_rational_numba(num: np.ndarray, den: int) -> np.ndarray:
    num = np.asarray(num, dtype=np.int64)
    if int(den) <= 0:
        raise ValueError("denominator must be positive")
    flat = np.ascontiguousarray(num.reshape(-1, 4))
    out = np.empty_like(flat)
    _quantize_rational_rows(flat, np.int64(den), out)
    return out.reshape(num.shape)


# ---------------------------------------------------------------------------
# floating D4* quantizer


def quantize_float_numpy(x: np.ndarray) -> np.ndarray:
    """Doubled coordinates of the Hurwitz point nearest to real ``x``."""
    x = np.asarray(x, dtype=np.float64)
    # candidates from ceil(x) avoid the cancellation in ceil(x - 1/2) and ceil(x - 1)
    c = np.ceil(x)
    k = np.where(x <= c - 0.5, c - 1.0, c)
    m = c - 1.0
    s_int = ((x - k) ** 2).sum(axis=-1)
    s_half = ((x - m - 0.5) ** 2).sum(axis=-1)
    d_int = 2 * k
    d_half = 2 * m + 1
    take_half = (s_half < s_int) | ((s_half == s_int) & (d_half[..., 0] < d_int[..., 0]))
    return np.where(take_half[..., None], d_half, d_int).astype(np.int64)


@njit(cache=True)
def _quantize_float4(x, out):
    s_int = 0.0
    s_half = 0.0
    kk = np.empty(4)
    mm = np.empty(4)
    for c in range(4):
        cc = np.ceil(x[c])
        kk[c] = cc - 1.0 if x[c] <= cc - 0.5 else cc
        mm[c] = cc - 1.0
        s_int += (x[c] - kk[c]) ** 2
        s_half += (x[c] - mm[c] - 0.5) ** 2
    half = s_half < s_int or (s_half == s_int and 2.0 * mm[0] + 1.0 < 2.0 * kk[0])
    for c in range(4):
        if half:
            out[c] = np.int64(2.0 * mm[c] + 1.0)
        else:
            out[c] = np.int64(2.0 * kk[c])


@njit(cache=True)
def _quantize_float_rows(x, out):
    for r in range(x.shape[0]):
        _quantize_float4(x[r], out[r])


def quantize_float_numba(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(x.reshape(-1, 4))
    out = np.empty(flat.shape, dtype=np.int64)
    _quantize_float_rows(flat, out)
    return out.reshape(x.shape)


@njit(cache=True)
def _residual_sq4(t0, t1, t2, t3):
    # squared distance from t to D4*; only the distance, so any rounding works
    a0 = t0 - np.floor(t0 + 0.5)
    a1 = t1 - np.floor(t1 + 0.5)
    a2 = t2 - np.floor(t2 + 0.5)
    a3 = t3 - np.floor(t3 + 0.5)
    s_int = a0 * a0 + a1 * a1 + a2 * a2 + a3 * a3
    b0 = t0 - np.floor(t0) - 0.5
    b1 = t1 - np.floor(t1) - 0.5
    b2 = t2 - np.floor(t2) - 0.5
    b3 = t3 - np.floor(t3) - 0.5
    s_half = b0 * b0 + b1 * b1 + b2 * b2 + b3 * b3
    return s_int if s_int < s_half else s_half


def residual_sq_numpy(t: np.ndarray) -> np.ndarray:
    """Squared distance from each real quaternion in ``t`` to D4* (last axis)."""
    a = t - np.floor(t + 0.5)
    b = t - np.floor(t) - 0.5
    return np.minimum((a * a).sum(axis=-1), (b * b).sum(axis=-1))


# ---------------------------------------------------------------------------
# wrapped nearest-codeword search
#
# For a modulus lattice M*H with M in {q, pi}, the wrapped squared distance of
# y to a codeword c equals Nrm(M) * sum_i dist(t_y_i - t_c_i, D4*)^2 where
# t = (.) * conj(M) / Nrm(M).  Both sides arrive here already mapped to t.


@njit(cache=True)
def _argmin_wrapped_range(ty, tc, start, stop):
    n = ty.shape[0]
    best = np.inf
    best_idx = start
    for m in range(start, stop):
        acc = 0.0
        for i in range(n):
            acc += _residual_sq4(
                ty[i, 0] - tc[m, i, 0],
                ty[i, 1] - tc[m, i, 1],
                ty[i, 2] - tc[m, i, 2],
                ty[i, 3] - tc[m, i, 3],
            )
            if acc >= best:
                break
        if acc < best:
            best = acc
            best_idx = m
    return best_idx, best


def argmin_wrapped_numba(ty: np.ndarray, tc: np.ndarray) -> tuple[int, float]:
    idx, best = _argmin_wrapped_range(
        np.ascontiguousarray(ty, dtype=np.float64),
        np.ascontiguousarray(tc, dtype=np.float64),
        0,
        tc.shape[0],
    )
    return int(idx), float(best)


def argmin_wrapped_numpy(ty: np.ndarray, tc: np.ndarray) -> tuple[int, float]:
    d = residual_sq_numpy(ty[None, :, :] - tc).sum(axis=-1)
    idx = int(np.argmin(d))
    return idx, float(d[idx])


@njit(cache=True)
def _qmul_float(a, b, out):
    out[0] = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
    out[1] = a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2]
    out[2] = a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1]
    out[3] = a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]


@njit(cache=True)
def _smd_kernel(y, q, rmul, tc_all, reenc_all, reenc_int, offsets, idx_out, point, w):
    n = y.shape[0]
    cur = np.empty((n, 4))
    tmp = np.empty(4)
    ty = np.empty((n, 4))
    zq = np.empty(4, dtype=np.int64)
    # centered reduction modulo qH
    for i in range(n):
        for c in range(4):
            tmp[c] = y[i, c] / q
        _quantize_float4(tmp, zq)
        for c in range(4):
            point[i, c] = q * zq[c]
            cur[i, c] = y[i, c] - q * 0.5 * zq[c]
    n_levels = offsets.shape[0] - 1
    for s in range(n_levels):
        for i in range(n):
            _qmul_float(cur[i], rmul[s], tmp)
            for c in range(4):
                ty[i, c] = tmp[c]
        best_idx, _ = _argmin_wrapped_range(ty, tc_all, offsets[s], offsets[s + 1])
        idx_out[s] = best_idx - offsets[s]
        for i in range(n):
            for c in range(4):
                cur[i, c] -= reenc_all[best_idx, i, c]
                point[i, c] += reenc_int[best_idx, i, c]
    for i in range(n):
        for c in range(4):
            tmp[c] = cur[i, c] / q
        _quantize_float4(tmp, zq)
        for c in range(4):
            point[i, c] += q * zq[c]
            w[i, c] = cur[i, c] - q * 0.5 * zq[c]


@njit(cache=True)
def _mld_kernel(y, q, tc, words, point):
    n = y.shape[0]
    ty = np.empty((n, 4))
    tmp = np.empty(4)
    zq = np.empty(4, dtype=np.int64)
    for i in range(n):
        for c in range(4):
            ty[i, c] = y[i, c] / q
    best_idx, best = _argmin_wrapped_range(ty, tc, 0, tc.shape[0])
    for i in range(n):
        for c in range(4):
            tmp[c] = (y[i, c] - 0.5 * words[best_idx, i, c]) / q
        _quantize_float4(tmp, zq)
        for c in range(4):
            point[i, c] = words[best_idx, i, c] + q * zq[c]
    return best_idx


def qmul_float(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product of real quaternion arrays (broadcasting)."""
    return hamilton_raw(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))


def smd_numba(y, q, rmul, tc_all, reenc_all, reenc_int, offsets):
    """Run the whole multistage pipeline; returns (level ordinals, point, residual)."""
    n = y.shape[0]
    idx = np.empty(offsets.shape[0] - 1, dtype=np.int64)
    point = np.empty((n, 4), dtype=np.int64)
    w = np.empty((n, 4), dtype=np.float64)
    _smd_kernel(y, float(q), rmul, tc_all, reenc_all, reenc_int, offsets, idx, point, w)
    return idx, point, w


def smd_numpy(y, q, rmul, tc_all, reenc_all, reenc_int, offsets):
    zhat = quantize_float_numpy(y / q)
    cur = y - q * 0.5 * zhat
    point = q * zhat
    n_levels = offsets.shape[0] - 1
    idx = np.empty(n_levels, dtype=np.int64)
    for s in range(n_levels):
        lo, hi = offsets[s], offsets[s + 1]
        ty = qmul_float(cur, rmul[s])
        j, _ = argmin_wrapped_numpy(ty, tc_all[lo:hi])
        idx[s] = j
        cur = cur - reenc_all[lo + j]
        point = point + reenc_int[lo + j]
    zfin = quantize_float_numpy(cur / q)
    w = cur - q * 0.5 * zfin
    return idx, point + q * zfin, w


def mld_numba(y, q, tc, words):
    """Exhaustive wrapped search; returns (codeword ordinal, exact lattice point)."""
    point = np.empty(y.shape, dtype=np.int64)
    idx = _mld_kernel(y, float(q), tc, words, point)
    return int(idx), point


def mld_numpy(y, q, tc, words):
    idx, _ = argmin_wrapped_numpy(y / q, tc)
    c = words[idx]
    h = quantize_float_numpy((y - 0.5 * c) / q)
    return idx, c + q * h


if USE_NUMBA:
    quantize_rational = quantize_rational_numba
    quantize_float = quantize_float_numba
    argmin_wrapped = argmin_wrapped_numba
    smd_run = smd_numba
    mld_run = mld_numba
else:
    quantize_rational = quantize_rational_numpy
    quantize_float = quantize_float_numpy
    argmin_wrapped = argmin_wrapped_numpy
    smd_run = smd_numpy
    mld_run = mld_numpy
