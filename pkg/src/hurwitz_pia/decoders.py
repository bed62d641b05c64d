"""Serial modulo (multistage) decoding and exhaustive ML decoding.

Received words are float arrays of shape ``(n, 4)``.  Decoded lattice points
are returned exactly, as doubled int64 arrays.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .construction import PiACode, side_modulus
from .crt import phi_split_batch
from .quaternion import HurwitzInt


@dataclass
class DecodeResult:
    point: np.ndarray  # (n, 4) doubled
    per_level_messages: list[np.ndarray] = field(repr=False)
    residual_noise: np.ndarray = field(repr=False)  # (n, 4) float, y - point
    elapsed: float = 0.0
    codeword_index: int | None = None


def _as_received(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 1:
        y = y.reshape(-1, 4)
    return y


def _mod_map(modulus) -> tuple[np.ndarray, float]:
    """Right multiplier that sends the modulus lattice onto H, and its norm."""
    if isinstance(modulus, HurwitzInt):
        n = modulus.norm()
        return np.array(modulus.conj().to_floats()) / n, float(n)
    q = float(modulus)
    return np.array([1.0 / q, 0.0, 0.0, 0.0]), q * q


def wrapped_distance_sq(y, c, modulus) -> float:
    """``sum_i |(y_i - c_i) mod M|^2`` for ``M`` = ``qH`` (int) or ``H*pi`` (HurwitzInt)."""
    y = _as_received(y)
    c = np.asarray([h.doubled if isinstance(h, HurwitzInt) else h for h in c], dtype=np.float64) / 2.0
    if y.shape != c.shape:
        raise ValueError("length mismatch")
    rmul, scale = _mod_map(modulus)
    t = kernels.qmul_float(y - c, rmul)
    return scale * float(kernels.residual_sq_numpy(t).sum())


def level_decode(y_level, codebook: np.ndarray, modulus) -> tuple[int, np.ndarray]:
    """Nearest level codeword under the wrapped metric of ``modulus``.

    Returns ``(ordinal, codeword)``; ties go to the lowest ordinal.
    """
    y = _as_received(y_level)
    if len(codebook) == 0:
        raise ValueError("empty codebook")
    rmul, _ = _mod_map(modulus)
    ty = kernels.qmul_float(y, rmul)
    tc = kernels.qmul_float(codebook / 2.0, rmul)
    idx, _ = kernels.argmin_wrapped(ty, tc)
    return idx, codebook[idx]


# ---------------------------------------------------------------------------
# maximum likelihood


def _mld_tables(code: PiACode) -> tuple[np.ndarray, np.ndarray]:
    if "mld" not in code.cache:
        words = np.ascontiguousarray(code.combined, dtype=np.int64)
        code.cache["mld"] = (np.ascontiguousarray(words / (2.0 * code.q)), words)
    return code.cache["mld"]


def mld_point(y: np.ndarray, code: PiACode) -> tuple[int, np.ndarray]:
    """Bare exhaustive search: ``(codeword ordinal, lattice point)`` for float ``(n, 4)`` input."""
    tc, words = _mld_tables(code)
    return kernels.mld_run(y, code.q, tc, words)


def mld_decode(y, code: PiACode) -> DecodeResult:
    """Exhaustive nearest lattice point of ``C + qH^n``."""
    t0 = time.perf_counter()
    y = _as_received(y)
    if code.size == 0:
        raise ValueError("empty codebook")
    idx, point = mld_point(y, code)
    elapsed = time.perf_counter() - t0
    levels = phi_split_batch(code.combined[idx], code.ctx)
    return DecodeResult(point, levels, y - point / 2.0, elapsed, idx)


# ---------------------------------------------------------------------------
# serial modulo decoding


@dataclass
class SmdTables:
    sides: list[int]  # side indices (0..2k-1) in processing order
    rmul: np.ndarray  # (L, 4)
    tc_all: np.ndarray  # (S, n, 4)
    reenc_all: np.ndarray  # (S, n, 4) float
    reenc_int: np.ndarray  # (S, n, 4) doubled
    offsets: np.ndarray  # (L+1,)


def _smd_tables(code: PiACode, order: Sequence[int] | None) -> SmdTables:
    levels = tuple(range(code.ctx.k)) if order is None else tuple(order)
    if sorted(levels) != list(range(code.ctx.k)):
        raise ValueError("order must be a permutation of the level indices")
    key = ("smd", levels)
    if key in code.cache:
        return code.cache[key]
    contrib = code.level_contributions()
    sides, rmul, tcs, exact = [], [], [], []
    for j in levels:
        for s in (0, 1):
            side = 2 * j + s
            r, _ = _mod_map(side_modulus(code.ctx, j, s))
            sides.append(side)
            rmul.append(r)
            tcs.append(kernels.qmul_float(code.level_codebooks[side] / 2.0, r))
            exact.append(contrib[side])
    offsets = np.cumsum([0] + [len(t) for t in tcs]).astype(np.int64)
    reenc_int = np.ascontiguousarray(np.concatenate(exact), dtype=np.int64)
    tables = SmdTables(
        sides,
        np.ascontiguousarray(np.array(rmul)),
        np.ascontiguousarray(np.concatenate(tcs)),
        np.ascontiguousarray(reenc_int / 2.0),
        reenc_int,
        offsets,
    )
    code.cache[key] = tables
    return tables


def smd_point(y: np.ndarray, code: PiACode, order: Sequence[int] | None = None):
    """Bare multistage pass: ``(per-side ordinals, lattice point, residual)``."""
    tab = _smd_tables(code, order)
    return kernels.smd_run(y, code.q, tab.rmul, tab.tc_all, tab.reenc_all, tab.reenc_int, tab.offsets)


def smd_decode(y, code: PiACode, order: Sequence[int] | None = None) -> DecodeResult:
    """Level-by-level reduce / decode / re-encode, then unwrap modulo ``qH^n``.

    ``order`` permutes the prime levels (default: ascending primes).
    """
    t0 = time.perf_counter()
    y = _as_received(y)
    idx, point, _ = smd_point(y, code, order)
    elapsed = time.perf_counter() - t0
    tab = code.cache[("smd", tuple(range(code.ctx.k)) if order is None else tuple(order))]
    levels: list[np.ndarray] = [None] * len(tab.sides)  # type: ignore[list-item]
    for pos, side in enumerate(tab.sides):
        levels[side] = code.level_codebooks[side][idx[pos]]
    return DecodeResult(point, levels, y - point / 2.0, elapsed)


DECODERS = {"smd": smd_decode, "mld": mld_decode}
BARE_DECODERS = {"smd": smd_point, "mld": mld_point}
