"""Stochastic generalized-sampling engine.

A :class:`FrameModel` holds truncated coordinates of a sampling frame and a
reconstruction system in an ambient orthonormal basis.  From it one builds a
:class:`LeverageProfile` (interaction vectors, Gram section, sampling
distribution), draws index multisets, forms the empirical Gram and cross-term
estimators, and solves the weighted least-squares reconstruction.

All types are immutable after construction; random draws are deterministic
per seed, so parallel Monte Carlo should derive disjoint seeds per trial
(trial t uses ``base_seed + t``).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModelError, InputValidationError, SupportViolationError
from .linalg import (
    as_matrix,
    default_rel_tol,
    minimal_norm_lsq,
    operator_norm,
    projector_from_columns,
    pseudo_inverse,
    range_distance,
)

__all__ = [
    "SUPPORT_TOL",
    "FrameModel",
    "LeverageProfile",
    "SampleDraw",
    "CoherenceProfile",
    "ChristoffelProfile",
    "ReconstructionReport",
    "RangeStability",
    "build_frame_model",
    "leverage_profile",
    "coherence_profile",
    "cross_term_matrix",
    "draw_samples",
    "empirical_gram",
    "empirical_cross_term",
    "reconstruct",
    "christoffel_profile",
    "range_stability_check",
]

# ||v_j|| below this counts as a structural zero (support of the interaction
# sequence in floating point).
SUPPORT_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FrameModel:
    """Truncated coordinates of the sampling and reconstruction systems.

    ``s_coef`` is N_amb x J (column j = sampling vector s_j in the ambient
    orthonormal basis); ``w_coef`` is N_amb x K (column k = reconstruction
    vector w_k).  ``declared_bounds`` optionally carries the frame/Riesz
    bounds (A, B, C, D).
    """

    s_coef: np.ndarray
    w_coef: np.ndarray
    declared_bounds: tuple[float, float, float, float] | None
    sampling_is_orthonormal: bool
    reconstruction_is_riesz: bool

    @property
    def ambient_dim(self) -> int:
        return self.s_coef.shape[0]

    @property
    def num_sampling(self) -> int:
        return self.s_coef.shape[1]

    @property
    def num_reconstruction(self) -> int:
        return self.w_coef.shape[1]


@dataclass(frozen=True)
class LeverageProfile:
    """Interaction vectors, Gram section and sampling distribution at a fixed
    reconstruction dimension n.

    ``v`` is n x J with column j the interaction vector v_j; ``sigma`` is the
    n x n Gram section (sum of v_j v_j^H); ``p`` the sampling distribution
    over the J model indices; ``lambda0`` the smallest retained (nonzero)
    eigenvalue of sigma.
    """

    n: int
    v: np.ndarray
    sigma: np.ndarray
    trace_sigma: float
    p: np.ndarray
    tail_mass: float
    lambda0: float

    @property
    def num_indices(self) -> int:
        return self.p.shape[0]

    @property
    def distribution_id(self) -> str:
        return _distribution_digest(self.p)


@dataclass(frozen=True)
class SampleDraw:
    """A multiset of drawn indices (0-based into the model columns) plus the
    seed and distribution digest that produced it."""

    indices: np.ndarray
    m: int
    seed: int
    distribution_id: str


@dataclass(frozen=True)
class CoherenceProfile:
    """Scalar coherence and spectral quantities feeding the sample-size
    calculators: R = sup ||v_j||^2/p_j, R' the residual analogue, their max
    R'', the limiting-operator scale K, and Lambda = 1 + ||Sigma^+|| + ||C||."""

    R: float
    R_prime: float
    R_double: float
    T_norm: float
    K_scale: float
    Lambda: float
    sigma_norm: float
    sigma_inv_norm: float
    C_norm: float


@dataclass(frozen=True)
class ChristoffelProfile:
    """Discrete Christoffel values K_P(j) = <Sigma^+ v_j, v_j>, their
    weighted values K_P(j)/p_j, and kappa_w = sup over the support."""

    values: np.ndarray
    weighted: np.ndarray
    kappa_w: float


@dataclass(frozen=True)
class ReconstructionReport:
    """Outcome of one weighted least-squares reconstruction."""

    x_tilde: np.ndarray
    f_tilde_coef: np.ndarray
    residual_weighted: float
    err_l2: float
    tail_err: float
    k_factor: float
    bound_ok: bool
    gram_condition: float | str
    used_pseudo_inverse: bool


@dataclass(frozen=True)
class RangeStability:
    equal: bool
    distance: float


def _distribution_digest(p: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(p, dtype=np.float64).tobytes()).hexdigest()[:16]


def build_frame_model(s_coef, w_coef, declared_bounds=None) -> FrameModel:
    """Assemble an immutable frame model, testing orthonormality of the
    sampling columns and full column rank of the reconstruction columns."""
    s = as_matrix(s_coef, name="s_coef")
    w = as_matrix(w_coef, name="w_coef")
    if s.shape[0] != w.shape[0]:
        raise InputValidationError(
            f"ambient row counts differ: s_coef has {s.shape[0]}, w_coef has {w.shape[0]}"
        )
    if declared_bounds is not None:
        a, b, c, d = (float(x) for x in declared_bounds)
        if not (0 < a <= b and 0 < c <= d):
            raise InputValidationError("declared bounds must satisfy 0 < A <= B, 0 < C <= D")
        declared_bounds = (a, b, c, d)

    gram_s = s.conj().T @ s
    # Frobenius dominates the spectral norm, so this is a conservative test.
    orthonormal = bool(
        np.linalg.norm(gram_s - np.eye(s.shape[1])) <= 1e-8
    )
    sv_w = np.linalg.svd(w, compute_uv=False)
    riesz = bool(sv_w[0] > 0 and sv_w[-1] > default_rel_tol(w) * sv_w[0])
    return FrameModel(
        s_coef=_frozen(s),
        w_coef=_frozen(w),
        declared_bounds=declared_bounds,
        sampling_is_orthonormal=orthonormal,
        reconstruction_is_riesz=riesz,
    )


def _interaction_vectors(model: FrameModel, n: int) -> np.ndarray:
    # v_j = iota_n^* U^* e_j with U = s_coef^H w_coef; columns of the result.
    un = model.s_coef.conj().T @ model.w_coef[:, :n]
    return un.conj().T


def leverage_profile(model: FrameModel, n: int, p_spec="leverage") -> LeverageProfile:
    """Interaction vectors, Gram section and sampling distribution for the
    first n reconstruction vectors.

    ``p_spec`` is ``"leverage"`` (p_j proportional to ||v_j||^2),
    ``"uniform_on_support"``, or a custom nonnegative sequence (renormalized;
    must be positive wherever ||v_j|| exceeds the support tolerance).
    """
    if not 1 <= n <= model.num_reconstruction:
        raise InputValidationError(
            f"n must lie in [1, {model.num_reconstruction}], got {n}"
        )
    v = _interaction_vectors(model, n)
    vn2 = np.sum(np.abs(v) ** 2, axis=0).real
    sigma = v @ v.conj().T
    sigma = (sigma + sigma.conj().T) / 2.0
    trace_sigma = float(np.sum(vn2))
    if trace_sigma <= 0.0:
        raise DegenerateModelError("Gram section has zero trace; no usable interactions")

    support = vn2 > SUPPORT_TOL**2
    if isinstance(p_spec, str):
        if p_spec == "leverage":
            p = vn2 / trace_sigma
        elif p_spec == "uniform_on_support":
            p = support.astype(float)
            p /= p.sum()
        else:
            raise InputValidationError(f"unknown p_spec {p_spec!r}")
    else:
        p = np.asarray(p_spec, dtype=float).reshape(-1)
        if p.shape[0] != model.num_sampling:
            raise InputValidationError(
                f"custom p has length {p.shape[0]}, expected {model.num_sampling}"
            )
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise InputValidationError("custom p must be nonnegative and finite")
        bad = support & (p == 0.0)
        if np.any(bad):
            raise SupportViolationError(
                f"custom p is zero at indices with nonzero interaction: {np.flatnonzero(bad)[:5]}"
            )
        total = p.sum()
        if total <= 0.0:
            raise InputValidationError("custom p sums to zero")
        p = p / total

    eigs = np.linalg.eigvalsh(sigma)
    cutoff = default_rel_tol(sigma) * eigs[-1]
    retained = eigs[eigs > cutoff]
    lambda0 = float(retained[0]) if retained.size else 0.0
    if lambda0 <= 0.0:
        raise DegenerateModelError("Gram section is numerically zero")

    return LeverageProfile(
        n=n,
        v=_frozen(v),
        sigma=_frozen(sigma),
        trace_sigma=trace_sigma,
        p=_frozen(p),
        tail_mass=0.0,
        lambda0=lambda0,
    )


def _reconstruction_basis(model: FrameModel, n: int) -> np.ndarray:
    """Orthonormal basis (columns) of the span of the first n reconstruction
    vectors, rank-revealed through the SVD."""
    wn = model.w_coef[:, :n]
    u, s, _ = np.linalg.svd(wn, full_matrices=False)
    if s[0] == 0.0:
        return u[:, :0]
    r = int(np.count_nonzero(s > default_rel_tol(wn) * s[0]))
    return u[:, :r]


def _residual_columns(model: FrameModel, q: np.ndarray, cols=None) -> np.ndarray:
    """u_j = (I - P_{W_n}) s_j for the selected columns (all if None)."""
    s = model.s_coef if cols is None else model.s_coef[:, cols]
    return s - q @ (q.conj().T @ s)


def coherence_profile(model: FrameModel, prof: LeverageProfile) -> CoherenceProfile:
    """Coherence parameters R, R', R'', the limiting scales K and Lambda, and
    the spectral norms of the Gram section and cross-term."""
    p = prof.p
    supp = p > 0.0
    vn2 = np.sum(np.abs(prof.v) ** 2, axis=0).real
    q = _reconstruction_basis(model, prof.n)
    resid = _residual_columns(model, q)
    un2 = np.sum(np.abs(resid) ** 2, axis=0).real

    r_v = float(np.max(vn2[supp] / p[supp])) if np.any(supp) else 0.0
    r_u = float(np.max(un2[supp] / p[supp])) if np.any(supp) else 0.0
    sv_resid = np.linalg.svd(resid, compute_uv=False)
    t_norm = float(sv_resid[0] ** 2)
    c_mat = prof.v @ resid.conj().T
    c_norm = float(np.linalg.svd(c_mat, compute_uv=False)[0])
    sigma_norm = operator_norm(prof.sigma)
    sigma_inv_norm = 1.0 / prof.lambda0
    return CoherenceProfile(
        R=r_v,
        R_prime=r_u,
        R_double=max(r_v, r_u),
        T_norm=t_norm,
        K_scale=max(sigma_norm, t_norm),
        Lambda=1.0 + sigma_inv_norm + c_norm,
        sigma_norm=sigma_norm,
        sigma_inv_norm=sigma_inv_norm,
        C_norm=c_norm,
    )


def cross_term_matrix(model: FrameModel, prof: LeverageProfile) -> np.ndarray:
    """Limiting cross-term C = sum_j v_j u_j^H as an n x N_amb matrix."""
    q = _reconstruction_basis(model, prof.n)
    resid = _residual_columns(model, q)
    return prof.v @ resid.conj().T


def draw_samples(prof: LeverageProfile, m: int, seed: int) -> SampleDraw:
    """Draw m i.i.d. indices from the profile's distribution via inverse CDF.

    Deterministic for a fixed seed; repeated indices are kept as a multiset.
    """
    if m < 1:
        raise InputValidationError(f"m must be >= 1, got {m}")
    rng = np.random.default_rng(seed)
    u = rng.random(m)
    cdf = np.cumsum(prof.p)
    idx = np.searchsorted(cdf, u, side="right")
    # Guard against cumulative rounding: remap overflow to the last supported index.
    last = int(np.flatnonzero(prof.p > 0)[-1])
    idx = np.minimum(idx, last)
    return SampleDraw(
        indices=_frozen(idx.astype(np.int64)),
        m=int(m),
        seed=int(seed),
        distribution_id=prof.distribution_id,
    )


def _check_draw(prof: LeverageProfile, draw: SampleDraw) -> None:
    if draw.distribution_id != prof.distribution_id:
        raise InputValidationError("draw was produced under a different distribution")


def empirical_gram(prof: LeverageProfile, draw: SampleDraw) -> np.ndarray:
    """Unbiased estimator (1/m) sum_t v_{i_t} v_{i_t}^H / p_{i_t} of the Gram
    section."""
    _check_draw(prof, draw)
    counts = np.bincount(draw.indices, minlength=prof.num_indices)
    sel = counts > 0
    weights = counts[sel] / (draw.m * prof.p[sel])
    vs = prof.v[:, sel]
    g = (vs * weights) @ vs.conj().T
    return (g + g.conj().T) / 2.0


def empirical_cross_term(
    model: FrameModel, prof: LeverageProfile, draw: SampleDraw
) -> np.ndarray:
    """Unbiased estimator (1/m) sum_t v_{i_t} u_{i_t}^H / p_{i_t} of the
    cross-term, as an n x N_amb matrix."""
    _check_draw(prof, draw)
    counts = np.bincount(draw.indices, minlength=prof.num_indices)
    sel = np.flatnonzero(counts > 0)
    weights = counts[sel] / (draw.m * prof.p[sel])
    q = _reconstruction_basis(model, prof.n)
    resid = _residual_columns(model, q, cols=sel)
    return (prof.v[:, sel] * weights) @ resid.conj().T


def _k_factor(model, prof, gram_hat, cross_hat) -> float:
    # ||W iota_n Sigma_hat^+ C_hat||; reduce through QR of the n reconstruction
    # columns so only small SVDs are taken.
    wn = model.w_coef[:, : prof.n]
    _, r = np.linalg.qr(wn)
    inner = r @ (pseudo_inverse(gram_hat) @ cross_hat)
    return float(np.linalg.svd(inner, compute_uv=False)[0])


def reconstruct(
    model: FrameModel, prof: LeverageProfile, draw: SampleDraw, f_coef
) -> ReconstructionReport:
    """Weighted least-squares reconstruction of ``f_coef`` from the drawn
    samples.

    Row t of the design is (m p_{i_t})^{-1/2} v_{i_t}^H with matching weighted
    right-hand side; the minimal-norm solve covers both the invertible and the
    rank-deficient (pseudo-inverse) path.
    """
    f = np.asarray(f_coef, dtype=complex).reshape(-1)
    if f.shape[0] != model.ambient_dim:
        raise InputValidationError(
            f"f_coef has length {f.shape[0]}, expected ambient dim {model.ambient_dim}"
        )
    if not np.all(np.isfinite(f.real)) or not np.all(np.isfinite(f.imag)):
        raise InputValidationError("f_coef contains non-finite entries")
    _check_draw(prof, draw)

    idx = draw.indices
    wts = 1.0 / np.sqrt(draw.m * prof.p[idx])
    design = prof.v[:, idx].conj().T * wts[:, None]
    samples = model.s_coef.conj().T @ f
    rhs = wts * samples[idx]
    x = minimal_norm_lsq(design, rhs)

    gram_hat = empirical_gram(prof, draw)
    sv = np.linalg.svd(gram_hat, compute_uv=False)
    full_rank = bool(sv[0] > 0 and sv[-1] > default_rel_tol(gram_hat) * sv[0])
    gram_condition: float | str
    gram_condition = float(sv[0] / sv[-1]) if full_rank else "rank-deficient"

    cross_hat = empirical_cross_term(model, prof, draw)
    k_factor = _k_factor(model, prof, gram_hat, cross_hat)

    wn = model.w_coef[:, : prof.n]
    f_tilde = wn @ x
    q = _reconstruction_basis(model, prof.n)
    tail = f - q @ (q.conj().T @ f)
    err_l2 = float(np.linalg.norm(f - f_tilde))
    tail_err = float(np.linalg.norm(tail))
    return ReconstructionReport(
        x_tilde=_frozen(x),
        f_tilde_coef=_frozen(f_tilde),
        residual_weighted=float(np.linalg.norm(design @ x - rhs)),
        err_l2=err_l2,
        tail_err=tail_err,
        k_factor=k_factor,
        bound_ok=bool(err_l2 <= tail_err * np.sqrt(1.0 + k_factor**2) + 1e-8),
        gram_condition=gram_condition,
        used_pseudo_inverse=not full_rank,
    )


def christoffel_profile(prof: LeverageProfile) -> ChristoffelProfile:
    """Christoffel values K_P(j) = <Sigma^+ v_j, v_j> for every index, their
    p-weighted values, and kappa_w = sup over the support."""
    sig_pinv = pseudo_inverse(prof.sigma)
    values = np.real(np.sum(prof.v.conj() * (sig_pinv @ prof.v), axis=0))
    values = np.clip(values, 0.0, None)
    supp = prof.p > 0.0
    weighted = np.zeros_like(values)
    weighted[supp] = values[supp] / prof.p[supp]
    kappa_w = float(np.max(weighted[supp])) if np.any(supp) else 0.0
    return ChristoffelProfile(
        values=_frozen(values), weighted=_frozen(weighted), kappa_w=kappa_w
    )


def range_stability_check(prof: LeverageProfile, draw: SampleDraw) -> RangeStability:
    """Compare the ranges of the empirical and limiting Gram sections through
    their orthogonal projectors."""
    gram_hat = empirical_gram(prof, draw)
    p_hat = projector_from_columns(gram_hat)
    p_lim = projector_from_columns(prof.sigma)
    dist = range_distance(p_hat, p_lim)
    return RangeStability(equal=bool(dist < 1e-6), distance=dist)
