"""Dense complex matrix algebra with a self-contained Hermitian eigensolver.

The eigensolver is a cyclic complex Jacobi iteration: each off-diagonal
entry h_pq is annihilated by a plane rotation composed of a phase transform
(which makes the 2x2 pivot block real symmetric) and a classical real Jacobi
rotation.  Iteration stops once the off-diagonal Frobenius mass drops below
1e-13 * (1 + ||H||_F).  This is accurate and simple for the small-to-moderate
dimensions arising from dual classes.

On top of the eigensolver sit the decompositions used throughout:
Re(T) = (T + T*)/2, Im(T) = (T - T*)/(2i), and for Hermitian H the spectral
parts H+ = (H + |H|)/2, H- = (|H| - H)/2.  Eigenvalues with modulus at most
1e-12 * ||H||_F count as zero when splitting, so spectral mass at the origin
lands in neither signed part (but also not in |H|, keeping H+ + H- = |H|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NumericalFailureError

OFF_DIAGONAL_FACTOR = 1e-13
HERMITIAN_TOLERANCE = 1e-10
ZERO_EIGENVALUE_FACTOR = 1e-12
MAX_SWEEPS = 100


def frobenius(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def _as_square(t) -> np.ndarray:
    a = np.asarray(t, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise InvalidArgumentError("matrix entries must be finite")
    return a


def check_hermitian(h) -> np.ndarray:
    """Validate Hermitian-ness up to rounding; returns the symmetrized input."""
    a = _as_square(h)
    defect = frobenius(a - a.conj().T)
    if defect > HERMITIAN_TOLERANCE * (1.0 + frobenius(a)):
        raise InvalidArgumentError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds tolerance"
        )
    return 0.5 * (a + a.conj().T)


@dataclass(frozen=True, eq=False)
class HermEig:
    """Eigenvalues (ascending) and a unitary matrix of column eigenvectors."""

    eigenvalues: np.ndarray
    vectors: np.ndarray


def _off_mass(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def _jacobi(a: np.ndarray, want_vectors: bool, max_sweeps: int):
    d = a.shape[0]
    target = OFF_DIAGONAL_FACTOR * (1.0 + frobenius(a))
    skip = target / (2.0 * d)
    v = np.eye(d, dtype=np.complex128) if want_vectors else None
    for _ in range(max_sweeps):
        if _off_mass(a) <= target:
            return a, v
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                m = abs(apq)
                if m <= skip:
                    continue
                theta = math.atan2(apq.imag, apq.real)
                tau = (a[q, q].real - a[p, p].real) / (2.0 * m)
                sign = 1.0 if tau >= 0.0 else -1.0
                t = sign / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                phase = complex(math.cos(theta), -math.sin(theta))  # e^{-i theta}
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * phase * cq
                a[:, q] = s * cp + c * phase * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                conj_phase = phase.conjugate()
                a[p, :] = c * rp - s * conj_phase * rq
                a[q, :] = s * rp + c * conj_phase * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * phase * vq
                    v[:, q] = s * vp + c * phase * vq
    if _off_mass(a) <= target:
        return a, v
    raise NumericalFailureError(
        f"Jacobi iteration did not converge within {max_sweeps} sweeps"
    )


def hermitian_eig(h, want_vectors: bool = True, max_sweeps: int = MAX_SWEEPS) -> HermEig:
    """Full spectral decomposition of a Hermitian matrix.

    Raises InvalidArgumentError for non-Hermitian input and
    NumericalFailureError if the sweep budget is exhausted.
    """
    a = check_hermitian(h)
    d = a.shape[0]
    if d == 1:
        vecs = np.eye(1, dtype=np.complex128) if want_vectors else None
        return HermEig(np.array([a[0, 0].real]), vecs)
    a, v = _jacobi(a, want_vectors, max_sweeps)
    vals = np.diag(a).real.copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = v[:, order] if want_vectors else None
    return HermEig(vals, vecs)


def hermitian_eigenvalues(h, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues only; skips eigenvector accumulation."""
    return hermitian_eig(h, want_vectors=False, max_sweeps=max_sweeps).eigenvalues


def real_part(t) -> np.ndarray:
    """(T + T*)/2; Hermitian for any square T."""
    a = _as_square(t)
    return 0.5 * (a + a.conj().T)


def imag_part(t) -> np.ndarray:
    """(T - T*)/(2i); Hermitian, and T = real_part(T) + 1j*imag_part(T)."""
    a = _as_square(t)
    return -0.5j * (a - a.conj().T)


def split_eigenvalues(vals: np.ndarray, scale: float):
    """Split a spectrum into positive and negated-negative parts.

    Entries within ZERO_EIGENVALUE_FACTOR * scale of the origin are dropped
    from both parts.
    """
    thr = ZERO_EIGENVALUE_FACTOR * scale
    pos = np.where(vals > thr, vals, 0.0)
    neg = np.where(vals < -thr, -vals, 0.0)
    return pos, neg


def _parts(h):
    a = check_hermitian(h)
    eig = hermitian_eig(a)
    pos, neg = split_eigenvalues(eig.eigenvalues, frobenius(a))
    return eig, pos, neg


def pos_part(h) -> np.ndarray:
    """H+ = (H + |H|)/2, positive semidefinite."""
    eig, pos, _ = _parts(h)
    return (eig.vectors * pos) @ eig.vectors.conj().T


def neg_part(h) -> np.ndarray:
    """H- = (|H| - H)/2, positive semidefinite, with H = H+ - H-."""
    eig, _, neg = _parts(h)
    return (eig.vectors * neg) @ eig.vectors.conj().T


def abs_part(h) -> np.ndarray:
    """Spectral absolute value |H| = H+ + H-."""
    eig, pos, neg = _parts(h)
    return (eig.vectors * (pos + neg)) @ eig.vectors.conj().T
