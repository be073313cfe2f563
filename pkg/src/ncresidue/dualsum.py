"""Deterministic reductions of symbol traces over the unitary dual.

The reductions here back every partial sum in the package.  A cutoff
schedule splits the dual into annuli; each annulus is covered by canonically
ordered chunks.  Chunk contributions are pairwise-summed by numpy and then
combined with Kahan compensation in chunk order, so results are
bit-reproducible and independent of the worker count (chunk boundaries are
fixed by the cutoffs alone).

Channel modes:

* ``abs``     sum of d * Tr|sigma|            (one real channel)
* ``signed``  sum of d * Tr sigma             (one complex channel)
* ``four``    d * (Tr R+, Tr R-, Tr I+, Tr I-) with R = Re sigma, I = Im sigma
* ``zeta``    sum of d * Tr sigma * weight**(-s)   (one complex channel)

Scalar symbols evaluate in bulk through their radial profile; diagonal
symbols through their diagonal vectors (entrywise absolute values and sign
splits, no eigensolver); dense symbols go through the Hermitian
eigendecompositions of Re sigma and Im sigma, one pair per class.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import matcalc
from .errors import InvalidArgumentError
from .symbols import MatrixSymbol

_MODE_CHANNELS = {"abs": 1, "signed": 1, "four": 4, "zeta": 1}
_MODE_DTYPE = {
    "abs": np.float64,
    "signed": np.complex128,
    "four": np.float64,
    "zeta": np.complex128,
}


def channel_count(mode: str) -> int:
    return _MODE_CHANNELS[mode]


def channel_dtype(mode: str):
    return _MODE_DTYPE[mode]


def _radial_terms(sym: MatrixSymbol, chunk, mode: str, s: float) -> np.ndarray:
    prof = sym.radial_profile(chunk.weights)
    d2 = chunk.dims * chunk.dims
    if mode == "abs":
        return np.array([np.sum(d2 * np.abs(prof))])
    if mode == "signed":
        return np.array([np.sum(d2 * prof)])
    if mode == "zeta":
        return np.array([np.sum(d2 * prof * chunk.weights ** (-s))])
    re = prof.real
    im = prof.imag
    return np.array(
        [
            np.sum(d2 * np.maximum(re, 0.0)),
            np.sum(d2 * np.maximum(-re, 0.0)),
            np.sum(d2 * np.maximum(im, 0.0)),
            np.sum(d2 * np.maximum(-im, 0.0)),
        ]
    )


def _diagonal_terms(sym: MatrixSymbol, chunk, mode: str, s: float) -> np.ndarray:
    nch = channel_count(mode)
    vals = np.zeros((len(chunk), nch), dtype=channel_dtype(mode))
    for i, el in enumerate(chunk.elements()):
        v = sym.diagonal(el)
        d = float(el.dim)
        if mode == "abs":
            vals[i, 0] = d * np.sum(np.abs(v))
        elif mode == "signed":
            vals[i, 0] = d * np.sum(v)
        elif mode == "zeta":
            vals[i, 0] = d * np.sum(v) * el.weight ** (-s)
        else:
            re = v.real
            im = v.imag
            vals[i, 0] = d * np.sum(np.maximum(re, 0.0))
            vals[i, 1] = d * np.sum(np.maximum(-re, 0.0))
            vals[i, 2] = d * np.sum(np.maximum(im, 0.0))
            vals[i, 3] = d * np.sum(np.maximum(-im, 0.0))
    return vals.sum(axis=0)


def _dense_terms(sym: MatrixSymbol, chunk, mode: str, s: float) -> np.ndarray:
    nch = channel_count(mode)
    vals = np.zeros((len(chunk), nch), dtype=channel_dtype(mode))
    for i, el in enumerate(chunk.elements()):
        mat = sym.evaluate(el)
        d = float(el.dim)
        if mode == "signed":
            vals[i, 0] = d * np.trace(mat)
        elif mode == "zeta":
            vals[i, 0] = d * np.trace(mat) * el.weight ** (-s)
        elif mode == "abs":
            # Tr|sigma| is defined through the spectral absolute value, which
            # requires Hermitian values on the dense path.
            eig = matcalc.hermitian_eigenvalues(mat)
            pos, neg = matcalc.split_eigenvalues(eig, matcalc.frobenius(mat))
            vals[i, 0] = d * np.sum(pos + neg)
        else:
            re = matcalc.real_part(mat)
            im = matcalc.imag_part(mat)
            pr, nr = matcalc.split_eigenvalues(
                matcalc.hermitian_eigenvalues(re), matcalc.frobenius(re)
            )
            pi, ni = matcalc.split_eigenvalues(
                matcalc.hermitian_eigenvalues(im), matcalc.frobenius(im)
            )
            vals[i, 0] = d * np.sum(pr)
            vals[i, 1] = d * np.sum(nr)
            vals[i, 2] = d * np.sum(pi)
            vals[i, 3] = d * np.sum(ni)
    return vals.sum(axis=0)


def _chunk_terms(sym: MatrixSymbol, chunk, mode: str, s: float) -> np.ndarray:
    if sym.radial_fn is not None:
        return _radial_terms(sym, chunk, mode, s).astype(channel_dtype(mode))
    if sym.diag_fn is not None:
        return _diagonal_terms(sym, chunk, mode, s)
    return _dense_terms(sym, chunk, mode, s)


class _Kahan:
    """Compensated accumulator for a fixed-length channel vector."""

    def __init__(self, nch: int, dtype):
        self.total = np.zeros(nch, dtype=dtype)
        self.comp = np.zeros(nch, dtype=dtype)

    def add(self, part: np.ndarray) -> None:
        y = part - self.comp
        t = self.total + y
        self.comp = (t - self.total) - y
        self.total = t

    def value(self) -> np.ndarray:
        return self.total.copy()


def annulus_sums(
    sym: MatrixSymbol,
    schedule,
    mode: str,
    s: float = 0.0,
    threads: int = 1,
) -> np.ndarray:
    """Channel sums per annulus of the cutoff schedule, shape (J, channels).

    Annulus j covers weights in (schedule[j-1], schedule[j]] (starting from
    zero), so every dual class is evaluated exactly once.  Cumulative sums of
    the rows give the partial-sum series of the schedule.
    """
    if mode not in _MODE_CHANNELS:
        raise InvalidArgumentError(f"unknown reduction mode {mode!r}")
    schedule = [float(x) for x in schedule]
    if not schedule:
        raise InvalidArgumentError("schedule must be non-empty")
    if schedule[0] < 1.0 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InvalidArgumentError("schedule must be strictly increasing with values >= 1")
    nch = channel_count(mode)
    dtype = channel_dtype(mode)
    out = np.zeros((len(schedule), nch), dtype=dtype)
    group = sym.group
    lo = 0.0
    if threads > 1:
        pool = ThreadPoolExecutor(max_workers=threads)
    else:
        pool = None
    try:
        for j, hi in enumerate(schedule):
            acc = _Kahan(nch, dtype)
            chunks = group.dual_chunks(lo, hi)
            if pool is None:
                parts = (_chunk_terms(sym, c, mode, s) for c in chunks)
            else:
                parts = pool.map(lambda c: _chunk_terms(sym, c, mode, s), chunks)
            for part in parts:
                acc.add(part.astype(dtype))
            out[j] = acc.value()
            lo = hi
    finally:
        if pool is not None:
            pool.shutdown()
    return out


def cumulative_sums(annuli: np.ndarray) -> np.ndarray:
    """Kahan-compensated cumulative sums down the annulus axis."""
    out = np.empty_like(annuli)
    acc = _Kahan(annuli.shape[1], annuli.dtype)
    for j in range(annuli.shape[0]):
        acc.add(annuli[j])
        out[j] = acc.value()
    return out
