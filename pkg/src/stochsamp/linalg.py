"""Dense complex linear algebra kernel.

Everything here runs through one SVD backbone (``numpy.linalg.svd``) so that
operator norms, pseudo-inverses, projectors and least-squares solves all share
a single rank decision.  Matrices are plain ``numpy.ndarray`` with complex
entries; all functions are pure and never mutate their inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import InputValidationError

__all__ = [
    "default_rel_tol",
    "as_matrix",
    "operator_norm",
    "numerical_rank",
    "pseudo_inverse",
    "minimal_norm_lsq",
    "hermitian_dilation",
    "effective_rank",
    "projector_from_columns",
    "range_distance",
]


def default_rel_tol(a: np.ndarray) -> float:
    """Relative singular-value cutoff used for rank decisions: 1e-10 * max(shape)."""
    return 1e-10 * max(a.shape)


def as_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a 2-d complex array, validating shape and finiteness."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise InputValidationError(f"{name} must be 2-dimensional, got ndim={m.ndim}")
    if m.size == 0:
        raise InputValidationError(f"{name} must be nonempty")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise InputValidationError(f"{name} contains non-finite entries")
    return m


def operator_norm(a) -> float:
    """Largest singular value of ``a`` (the spectral norm)."""
    m = as_matrix(a)
    return float(np.linalg.svd(m, compute_uv=False)[0])


def numerical_rank(a, rel_tol: float | None = None) -> int:
    """Number of singular values above ``rel_tol * sigma_max``."""
    m = as_matrix(a)
    if rel_tol is None:
        rel_tol = default_rel_tol(m)
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def _svd_with_rank(m: np.ndarray, rel_tol: float):
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    if s[0] == 0.0:
        r = 0
    else:
        r = int(np.count_nonzero(s > rel_tol * s[0]))
    return u, s, vh, r


def pseudo_inverse(a, rel_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with singular values <= rel_tol * sigma_max
    treated as zero.  An all-zero matrix maps to the zero matrix of transposed
    shape (rank 0)."""
    m = as_matrix(a)
    if rel_tol is None:
        rel_tol = default_rel_tol(m)
    if not 0.0 < rel_tol < 1.0:
        raise InputValidationError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    u, s, vh, r = _svd_with_rank(m, rel_tol)
    if r == 0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=complex)
    return (vh[:r].conj().T / s[:r]) @ u[:, :r].conj().T


def minimal_norm_lsq(design, rhs, rel_tol: float | None = None) -> np.ndarray:
    """Minimal Euclidean-norm solution of min_x ||design @ x - rhs||.

    Computed as ``pinv(design) @ rhs`` through the shared SVD rank decision,
    which covers both full-rank and rank-deficient designs.
    """
    m = as_matrix(design, name="design")
    b = np.asarray(rhs, dtype=complex).reshape(-1)
    if b.shape[0] != m.shape[0]:
        raise InputValidationError(
            f"rhs length {b.shape[0]} does not match design rows {m.shape[0]}"
        )
    if not np.all(np.isfinite(b.real)) or not np.all(np.isfinite(b.imag)):
        raise InputValidationError("rhs contains non-finite entries")
    if rel_tol is None:
        rel_tol = default_rel_tol(m)
    u, s, vh, r = _svd_with_rank(m, rel_tol)
    if r == 0:
        return np.zeros(m.shape[1], dtype=complex)
    return vh[:r].conj().T @ ((u[:, :r].conj().T @ b) / s[:r])


def hermitian_dilation(t) -> np.ndarray:
    """Self-adjoint block matrix [[0, T^H], [T, 0]] of a d2 x d1 matrix T.

    Realizes (x, y) -> (T^H y, T x) on the direct sum of the two spaces; its
    operator norm equals that of T.
    """
    m = as_matrix(t)
    d2, d1 = m.shape
    out = np.zeros((d1 + d2, d1 + d2), dtype=complex)
    out[:d1, d1:] = m.conj().T
    out[d1:, :d1] = m
    return out


def effective_rank(a) -> float:
    """trace(a) / operator_norm(a) for a self-adjoint PSD matrix; 0 for the
    zero matrix."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise InputValidationError("effective_rank requires a square matrix")
    scale = max(1.0, float(np.abs(m).max()))
    if operator_norm(m - m.conj().T) > 1e-10 * scale:
        raise InputValidationError("matrix is not self-adjoint within tolerance")
    w = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
    if w[0] < -1e-10 * scale:
        raise InputValidationError("matrix is not positive semidefinite within tolerance")
    top = float(np.max(np.abs(w)))
    if top == 0.0:
        return 0.0
    return float(np.sum(np.clip(w, 0.0, None))) / top


def projector_from_columns(cols, rel_tol: float | None = None) -> np.ndarray:
    """Orthogonal projector onto the column span of ``cols``.

    Rank-revealing through the shared SVD threshold, so duplicated or nearly
    dependent columns do not inflate the range.
    """
    m = as_matrix(cols, name="cols")
    if rel_tol is None:
        rel_tol = default_rel_tol(m)
    u, s, _, r = _svd_with_rank(m, rel_tol)
    if r == 0:
        return np.zeros((m.shape[0], m.shape[0]), dtype=complex)
    q = u[:, :r]
    return q @ q.conj().T


def _validate_projector(p: np.ndarray, name: str) -> None:
    scale = max(1.0, operator_norm(p))
    if operator_norm(p - p.conj().T) > 1e-8 * scale:
        raise InputValidationError(f"{name} is not self-adjoint within 1e-8")
    if operator_norm(p @ p - p) > 1e-8 * scale:
        raise InputValidationError(f"{name} is not idempotent within 1e-8")


def range_distance(p, q) -> float:
    """Operator norm ||P - Q|| between two orthogonal projectors.

    Equals max{||P Q_perp||, ||Q P_perp||}; a value below a caller-chosen
    threshold certifies equal ranges.
    """
    pm = as_matrix(p, name="p")
    qm = as_matrix(q, name="q")
    if pm.shape != qm.shape or pm.shape[0] != pm.shape[1]:
        raise InputValidationError("projectors must be square and of equal dimension")
    _validate_projector(pm, "p")
    _validate_projector(qm, "q")
    return operator_norm(pm - qm)
