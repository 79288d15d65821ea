"""Operator-valued frame families and the operators derived from them.

A family is an ordered list of linear maps G_j from H (dimension ``dim_h``)
into the space of d_k x d_k matrices.  Stacking the row-major vectorization
of each map turns every derived object into dense matrix algebra:

* synthesis matrix  T  (dim_h x count*dim_k^2): block j is the conjugate
  transpose of the vectorized matrix of G_j,
* analysis matrix   T* = T^H,
* frame operator    S = T T^H, Hermitian positive semidefinite.

Optimal frame bounds are always reported: the extreme eigenvalues of S,
equivalently the extreme squared singular values of T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import as_vector
from .errors import (
    InternalConsistencyError,
    NotAFrameError,
    NumericError,
    ValidationError,
)

__all__ = [
    "HSMap",
    "HSFrameFamily",
    "CoefficientSequence",
    "FrameReport",
    "RieszCheck",
    "DualCheck",
    "analyze",
    "synthesize",
    "frame_operator",
    "frame_bounds",
    "classify",
    "riesz_inequality_check",
    "canonical_dual",
    "reconstruct",
    "verify_alternate_dual",
    "frame_operator_hs_norm_bound",
]

#: Relative cutoff (against the largest singular value) for rank decisions.
DEFAULT_RANK_TOL = 1e-10


class HSMap:
    """One frame element: a linear map from H into d_k x d_k matrices.

    Stored through its images on the standard basis of H: ``images[i]`` is
    the matrix the i-th basis vector is sent to, so the action on ``f`` is
    ``sum_i f[i] * images[i]``.
    """

    def __init__(self, images):
        arr = np.array(images, dtype=np.complex128)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValidationError(
                f"map images must have shape (dim_h, d_k, d_k), got {arr.shape}"
            )
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValidationError(f"map images must be nonempty, got {arr.shape}")
        arr.flags.writeable = False
        self.images = arr

    @property
    def dim_h(self) -> int:
        return self.images.shape[0]

    @property
    def dim_k(self) -> int:
        return self.images.shape[1]

    @cached_property
    def matrix(self) -> np.ndarray:
        """Vectorized matrix of the map, shape (dim_k^2, dim_h).

        Column i is the row-major flattening of ``images[i]``; the adjoint
        of the map is the conjugate transpose of this matrix.
        """
        m = self.images.reshape(self.dim_h, -1).T.copy()
        m.flags.writeable = False
        return m

    def __call__(self, f) -> np.ndarray:
        fv = as_vector(f)
        if fv.size != self.dim_h:
            raise ValidationError(f"vector length {fv.size} != dim_h {self.dim_h}")
        return np.tensordot(fv, self.images, axes=1)

    def adjoint_apply(self, block) -> np.ndarray:
        """Apply the adjoint map to one d_k x d_k coefficient block."""
        b = np.asarray(block, dtype=np.complex128)
        if b.shape != (self.dim_k, self.dim_k):
            raise ValidationError(
                f"block shape {b.shape} != ({self.dim_k}, {self.dim_k})"
            )
        return self.matrix.conj().T @ b.reshape(-1)

    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.matrix, ord=2))


class HSFrameFamily:
    """Ordered finite family of maps with common dimensions, immutable."""

    def __init__(self, maps):
        maps = tuple(m if isinstance(m, HSMap) else HSMap(m) for m in maps)
        if not maps:
            raise ValidationError("a family needs at least one map")
        dim_h, dim_k = maps[0].dim_h, maps[0].dim_k
        for j, m in enumerate(maps):
            if m.dim_h != dim_h or m.dim_k != dim_k:
                raise ValidationError(
                    f"map {j} has dims ({m.dim_h}, {m.dim_k}), expected ({dim_h}, {dim_k})"
                )
        self.maps = maps
        self.dim_h = dim_h
        self.dim_k = dim_k

    @property
    def count(self) -> int:
        return len(self.maps)

    def __len__(self) -> int:
        return len(self.maps)

    def __getitem__(self, j) -> HSMap:
        return self.maps[j]

    @cached_property
    def synthesis_matrix(self) -> np.ndarray:
        """Dense synthesis operator, shape (dim_h, count * dim_k^2)."""
        t = np.hstack([m.matrix.conj().T for m in self.maps])
        t.flags.writeable = False
        return t

    @classmethod
    def from_synthesis_matrix(cls, dim_h, dim_k, tmat) -> "HSFrameFamily":
        """Rebuild a family from a dense synthesis matrix."""
        t = np.asarray(tmat, dtype=np.complex128)
        blk = dim_k * dim_k
        if t.ndim != 2 or t.shape[0] != dim_h or t.shape[1] % blk != 0:
            raise ValidationError(
                f"synthesis matrix shape {t.shape} inconsistent with "
                f"dim_h={dim_h}, dim_k={dim_k}"
            )
        maps = []
        for j in range(t.shape[1] // blk):
            block = t[:, j * blk : (j + 1) * blk]
            # block = adjoint of the vectorized map, so images come from conj
            maps.append(HSMap(block.conj().reshape(dim_h, dim_k, dim_k)))
        return cls(maps)

    def __repr__(self) -> str:
        return (
            f"<HSFrameFamily dim_h={self.dim_h} dim_k={self.dim_k} "
            f"count={self.count}>"
        )


class CoefficientSequence:
    """One d_k x d_k coefficient block per family index."""

    def __init__(self, blocks):
        arr = np.array(blocks, dtype=np.complex128)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValidationError(
                f"coefficient blocks must have shape (count, d_k, d_k), got {arr.shape}"
            )
        arr.flags.writeable = False
        self.blocks = arr

    @classmethod
    def from_stacked(cls, vec, dim_k) -> "CoefficientSequence":
        v = as_vector(vec)
        blk = dim_k * dim_k
        if v.size % blk != 0:
            raise ValidationError(f"stacked length {v.size} not a multiple of {blk}")
        return cls(v.reshape(-1, dim_k, dim_k))

    @property
    def dim_k(self) -> int:
        return self.blocks.shape[1]

    def __len__(self) -> int:
        return self.blocks.shape[0]

    def __getitem__(self, j) -> np.ndarray:
        return self.blocks[j]

    def stacked(self) -> np.ndarray:
        """Concatenation of the vectorized blocks."""
        return self.blocks.reshape(-1)

    def norm(self) -> float:
        """Direct-sum norm: sqrt of the summed squared block norms."""
        return float(np.linalg.norm(self.blocks))


@dataclass(frozen=True)
class FrameReport:
    """Classification of a family via its synthesis operator."""

    lower_bound: float
    upper_bound: float
    bessel: bool
    frame: bool
    riesz: bool
    complete: bool
    riesz_lower: float | None
    riesz_upper: float | None
    synthesis_norm: float
    pseudo_inverse_norm: float


@dataclass(frozen=True)
class RieszCheck:
    """Worst-case synthesis ratios found by sampling coefficient sequences."""

    min_ratio: float
    max_ratio: float
    riesz: bool


@dataclass(frozen=True)
class DualCheck:
    ok: bool
    max_residual: float
    identity_gap: float


def _check_vector(family: HSFrameFamily, f) -> np.ndarray:
    fv = as_vector(f)
    if fv.size != family.dim_h:
        raise ValidationError(f"vector length {fv.size} != dim_h {family.dim_h}")
    return fv


def _check_coefficients(family: HSFrameFamily, coeffs: CoefficientSequence):
    if len(coeffs) != family.count or coeffs.dim_k != family.dim_k:
        raise ValidationError(
            f"coefficient sequence ({len(coeffs)} blocks of dim {coeffs.dim_k}) "
            f"does not match family ({family.count} maps of dim {family.dim_k})"
        )


def analyze(family: HSFrameFamily, f) -> CoefficientSequence:
    """Coefficient blocks {G_j f} of a vector."""
    fv = _check_vector(family, f)
    return CoefficientSequence.from_stacked(
        family.synthesis_matrix.conj().T @ fv, family.dim_k
    )


def synthesize(family: HSFrameFamily, coeffs: CoefficientSequence) -> np.ndarray:
    """Sum of adjoint images sum_j G_j*(A_j); order-independent finite sum."""
    _check_coefficients(family, coeffs)
    return family.synthesis_matrix @ coeffs.stacked()


def frame_operator(family: HSFrameFamily) -> np.ndarray:
    """Hermitian positive semidefinite operator S = T T^H on H."""
    t = family.synthesis_matrix
    s = t @ t.conj().T
    return (s + s.conj().T) / 2.0


def frame_bounds(family: HSFrameFamily) -> tuple[float, float]:
    """Optimal bounds: the extreme eigenvalues of the frame operator."""
    try:
        w = np.linalg.eigvalsh(frame_operator(family))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue computation failed: {exc}") from exc
    return max(float(w[0]), 0.0), float(w[-1])


def classify(family: HSFrameFamily, rank_tol: float = DEFAULT_RANK_TOL) -> FrameReport:
    """Bessel / frame / Riesz / complete flags plus operator norms.

    Every finite family is Bessel.  Frame and complete both mean the
    synthesis matrix has full row rank; Riesz additionally requires a
    trivial kernel (so its column count cannot exceed ``dim_h``).  Rank
    decisions use ``rank_tol`` relative to the largest singular value.
    """
    if not 0.0 < rank_tol < 1.0:
        raise ValidationError(f"rank_tol must be in (0, 1), got {rank_tol!r}")
    t = family.synthesis_matrix
    sigma = np.linalg.svd(t, compute_uv=False)
    smax = float(sigma[0])
    if smax > 0.0:
        kept = sigma[sigma > rank_tol * smax]
        rank = int(kept.size)
        pinv_norm = 1.0 / float(kept[-1])
    else:
        rank = 0
        pinv_norm = math.inf
    lower, upper = frame_bounds(family)
    is_frame = rank == family.dim_h
    is_riesz = is_frame and rank == t.shape[1]
    return FrameReport(
        lower_bound=lower,
        upper_bound=upper,
        bessel=True,
        frame=is_frame,
        riesz=is_riesz,
        complete=is_frame,
        riesz_lower=float(sigma[-1]) ** 2 if is_riesz else None,
        riesz_upper=smax**2 if is_riesz else None,
        synthesis_norm=smax,
        pseudo_inverse_norm=pinv_norm,
    )


def riesz_inequality_check(
    family: HSFrameFamily,
    trials: int = 64,
    seed: int = 0,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> RieszCheck:
    """Sample the two-sided synthesis inequality and judge the Riesz property.

    Samples random coefficient sequences plus the extreme right singular
    directions of the synthesis matrix (including a kernel direction when
    one exists), and returns the worst ratios ``|T c|^2 / |c|^2``.  The
    verdict is positive when the smallest ratio stays away from zero and
    the family is complete.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    t = family.synthesis_matrix
    ncols = t.shape[1]
    _, _, vh = np.linalg.svd(t, full_matrices=True)
    samples = [vh[0].conj(), vh[-1].conj()]
    for _ in range(trials):
        c = rng.standard_normal(ncols) + 1j * rng.standard_normal(ncols)
        samples.append(c / np.linalg.norm(c))
    ratios = [float(np.linalg.norm(t @ c) ** 2) / float(np.linalg.norm(c) ** 2)
              for c in samples]
    lo, hi = min(ratios), max(ratios)
    w = np.linalg.eigvalsh(frame_operator(family))
    complete = float(w[0]) > rank_tol * float(w[-1])
    verdict = complete and lo > rank_tol * hi
    return RieszCheck(min_ratio=lo, max_ratio=hi, riesz=verdict)


def _require_frame(family: HSFrameFamily, rank_tol: float) -> None:
    t = family.synthesis_matrix
    sigma = np.linalg.svd(t, compute_uv=False)
    smax = float(sigma[0])
    rank = int(np.count_nonzero(sigma > rank_tol * smax)) if smax > 0 else 0
    if rank != family.dim_h:
        raise NotAFrameError(
            f"family is not a frame: synthesis rank {rank} < dim_h {family.dim_h} "
            "(lower bound zero)"
        )


def canonical_dual(
    family: HSFrameFamily, rank_tol: float = DEFAULT_RANK_TOL
) -> HSFrameFamily:
    """Dual family {G_j S^-1}; its bounds are the inverted original bounds."""
    _require_frame(family, rank_tol)
    s = frame_operator(family)
    sinv = np.linalg.inv(s)
    return HSFrameFamily.from_synthesis_matrix(
        family.dim_h, family.dim_k, sinv @ family.synthesis_matrix
    )


def reconstruct(
    family: HSFrameFamily, f, rank_tol: float = DEFAULT_RANK_TOL
) -> np.ndarray:
    """Resynthesize f as sum_j S^-1 G_j* G_j f; equals f for frames."""
    fv = _check_vector(family, f)
    _require_frame(family, rank_tol)
    sf = synthesize(family, analyze(family, fv))
    return np.linalg.solve(frame_operator(family), sf)


def verify_alternate_dual(
    family: HSFrameFamily,
    candidate: HSFrameFamily,
    trials: int = 16,
    seed: int = 0,
    tol: float = 1e-9,
) -> DualCheck:
    """Check both dual reconstruction identities on random vectors.

    A candidate {V_j} is a dual of {G_j} when f = sum_j G_j* V_j f and
    f = sum_j V_j* G_j f for every f; the two identities are adjoint to
    each other, and their mutual gap is reported as a diagnostic.
    """
    if (
        candidate.count != family.count
        or candidate.dim_h != family.dim_h
        or candidate.dim_k != family.dim_k
    ):
        raise ValidationError("candidate dual must match the family's sizes")
    rng = np.random.default_rng(seed)
    max_residual = 0.0
    identity_gap = 0.0
    for _ in range(max(1, trials)):
        f = rng.standard_normal(family.dim_h) + 1j * rng.standard_normal(family.dim_h)
        nf = float(np.linalg.norm(f))
        r1 = synthesize(family, analyze(candidate, f)) - f
        r2 = synthesize(candidate, analyze(family, f)) - f
        max_residual = max(
            max_residual,
            float(np.linalg.norm(r1)) / nf,
            float(np.linalg.norm(r2)) / nf,
        )
        identity_gap = max(identity_gap, float(np.linalg.norm(r1 - r2)) / nf)
    return DualCheck(
        ok=bool(max_residual <= tol),
        max_residual=max_residual,
        identity_gap=identity_gap,
    )


def frame_operator_hs_norm_bound(family: HSFrameFamily) -> tuple[float, float]:
    """Frobenius norm of S against the Bessel estimate B * sqrt(dim_h).

    The estimate sums |S e| over an orthonormal basis of H, so the
    cardinality entering it is the dimension of H (equal for the identity,
    where the inequality is tight).
    """
    s = frame_operator(family)
    hs = float(np.linalg.norm(s))
    b = frame_bounds(family)[1]
    bound = b * math.sqrt(family.dim_h)
    if hs > bound * (1.0 + 1e-12) + 1e-15:
        raise InternalConsistencyError(
            f"frame operator Frobenius norm {hs} exceeds bound {bound}"
        )
    return hs, bound
