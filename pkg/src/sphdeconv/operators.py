"""Block-diagonal convolution operators on harmonic coefficients.

A rotation-invariant kernel acts on each degree as a multiple of the
identity; measured or perturbed instruments act as a full (2l+1) x (2l+1)
matrix per degree.  Blocks are stored tagged (zero / scalar / dense) so
smooth instruments stay cheap, and the spectral thresholding that decides
which degrees are recoverable at a given instrument-noise level works
block by block without ever materializing the whole operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import svdvals

from .harmonics import HarmonicCoeffs

# dense blocks up to this dimension go straight to exact SVD; above it a
# cheap column-norm certificate settles clear kills first
_EXACT_SVD_DIM = 301


class BlockOperator:
    """Blockwise linear map on coefficients, degrees 0..lmax.

    Per-degree storage is None (zero block), a float (that multiple of
    the identity), or a dense (2l+1, 2l+1) array.
    """

    def __init__(self, lmax: int, blocks=None):
        if lmax < 0:
            raise ValueError("lmax must be >= 0")
        self.lmax = int(lmax)
        if blocks is None:
            blocks = [None] * (self.lmax + 1)
        if len(blocks) != self.lmax + 1:
            raise ValueError(f"expected {self.lmax + 1} blocks")
        self.blocks = list(blocks)
        for l, b in enumerate(self.blocks):
            if b is None or np.isscalar(b):
                continue
            b = np.asarray(b, dtype=float)
            d = 2 * l + 1
            if b.shape != (d, d):
                raise ValueError(f"block {l} must be {d} x {d}, got {b.shape}")
            self.blocks[l] = b

    def block(self, l: int):
        """Degree-l block as a dense matrix."""
        if not (0 <= l <= self.lmax):
            raise ValueError(f"degree {l} outside [0, {self.lmax}]")
        b = self.blocks[l]
        d = 2 * l + 1
        if b is None:
            return np.zeros((d, d))
        if np.isscalar(b):
            return float(b) * np.eye(d)
        return b

    def is_scalar(self, l: int) -> bool:
        return np.isscalar(self.blocks[l])

    def apply(self, coeffs: HarmonicCoeffs) -> HarmonicCoeffs:
        """Blockwise product; input degrees must not exceed lmax."""
        if coeffs.lmax > self.lmax:
            raise ValueError(
                f"input degrees up to {coeffs.lmax} exceed the operator's {self.lmax}"
            )
        out = HarmonicCoeffs(coeffs.lmax)
        for l in range(coeffs.lmax + 1):
            b = self.blocks[l]
            if b is None:
                continue
            src = coeffs.block(l)
            if np.isscalar(b):
                out.block(l)[:] = float(b) * src
            else:
                out.block(l)[:] = b @ src
        return out

    def solve(self, coeffs: HarmonicCoeffs) -> HarmonicCoeffs:
        """Blockwise inverse applied to coeffs; singular blocks raise."""
        if coeffs.lmax > self.lmax:
            raise ValueError(
                f"input degrees up to {coeffs.lmax} exceed the operator's {self.lmax}"
            )
        out = HarmonicCoeffs(coeffs.lmax)
        for l in range(coeffs.lmax + 1):
            b = self.blocks[l]
            src = coeffs.block(l)
            if b is None:
                raise np.linalg.LinAlgError(f"block {l} is zero, cannot solve")
            if np.isscalar(b):
                if b == 0.0:
                    raise np.linalg.LinAlgError(f"block {l} is zero, cannot solve")
                out.block(l)[:] = src / float(b)
            else:
                out.block(l)[:] = np.linalg.solve(b, src)
        return out

    def sigma_extremes(self, l: int):
        """(smallest, largest) singular value of the degree-l block."""
        b = self.blocks[l] if 0 <= l <= self.lmax else None
        if b is None:
            if not (0 <= l <= self.lmax):
                raise ValueError(f"degree {l} outside [0, {self.lmax}]")
            return 0.0, 0.0
        if np.isscalar(b):
            return abs(float(b)), abs(float(b))
        sv = svdvals(b)
        return float(sv[-1]), float(sv[0])

    def copy(self) -> "BlockOperator":
        return BlockOperator(
            self.lmax,
            [b.copy() if isinstance(b, np.ndarray) else b for b in self.blocks],
        )


def block_inverse_norm(K: BlockOperator, l: int) -> float:
    """Operator norm of the degree-l block's inverse (inf if singular)."""
    smin, _ = K.sigma_extremes(l)
    return np.inf if smin == 0.0 else 1.0 / smin


def rosenthal(alpha: float, nu: float, lmax: int) -> BlockOperator:
    """Smooth rotation-invariant test instrument.

    Degree l is scaled by (sin((l + 1/2) alpha) / ((2l + 1) sin(alpha / 2)))
    raised to the nu-th power; a negative base with non-integer nu keeps
    the base's sign against its magnitude raised to nu.  At alpha = pi the
    scale is (-1)^l / (2l + 1)^nu, so inverse norms grow like (2l+1)^nu.
    """
    if not (0.0 < alpha <= np.pi):
        raise ValueError("alpha must lie in (0, pi]")
    ls = np.arange(lmax + 1, dtype=float)
    base = np.sin((ls + 0.5) * alpha) / ((2.0 * ls + 1.0) * np.sin(alpha / 2.0))
    if float(nu).is_integer():
        vals = base ** int(nu)
    else:
        vals = np.sign(base) * np.abs(base) ** float(nu)
    return BlockOperator(lmax, [float(v) for v in vals])


def perturb(K: BlockOperator, delta: float, rng: np.random.Generator) -> BlockOperator:
    """K plus delta times an independent standard normal per block entry.

    Blocks are drawn in ascending degree, row-major within a block, so a
    given generator state fixes the result.  Every block densifies: at
    lmax around 500 that is on the order of 1.4 GB, so large instruments
    should go through threshold_perturbed, which streams the draws.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if delta == 0.0:
        return K.copy()
    blocks = []
    for l in range(K.lmax + 1):
        d = 2 * l + 1
        g = rng.standard_normal((d, d))
        b = K.blocks[l]
        if b is None:
            blocks.append(delta * g)
        elif np.isscalar(b):
            m = delta * g
            m[np.diag_indices(d)] += float(b)
            blocks.append(m)
        else:
            blocks.append(b + delta * g)
    return BlockOperator(K.lmax, blocks)


def spectral_cutoff(l, delta: float, kappa: float):
    """Spectral floor kappa sqrt(2l+1) delta sqrt(|ln delta|): the scale
    below which a degree-l block is indistinguishable from instrument
    noise.  A block stays recoverable while its smallest singular value
    clears this floor, i.e. while the inverse keeps the amplified noise
    below 1/floor."""
    if delta == 0.0:
        return np.zeros_like(np.asarray(l, dtype=float)) if np.ndim(l) else 0.0
    ls = np.asarray(l, dtype=float)
    return kappa * np.sqrt(2.0 * ls + 1.0) * delta * np.sqrt(abs(np.log(delta)))


@dataclass
class ThresholdedOperator:
    """Result of the recoverability screen: kept degrees with their
    (dense or scalar) blocks and spectral extremes, everything else
    treated as irrecoverable and mapped to zero on solve."""

    lmax: int            # top degree examined (inclusive)
    delta: float
    kappa: float
    J: int
    blocks: dict = field(default_factory=dict)      # l -> ndarray | float
    sigma_min: dict = field(default_factory=dict)   # l -> float
    sigma_max: dict = field(default_factory=dict)   # l -> float

    @property
    def kept(self):
        return sorted(self.blocks)

    @property
    def mask(self):
        """Boolean keep mask over degrees 0..lmax."""
        m = np.zeros(self.lmax + 1, dtype=bool)
        m[list(self.blocks)] = True
        return m

    def is_kept(self, l: int) -> bool:
        return l in self.blocks

    def inverse_norm(self, l: int) -> float:
        """Operator norm of the kept block's inverse."""
        if l not in self.blocks:
            raise KeyError(f"degree {l} was not kept")
        s = self.sigma_min[l]
        return np.inf if s == 0.0 else 1.0 / s

    def cutoff(self, l) -> float:
        return spectral_cutoff(l, self.delta, self.kappa)

    def min_kept_in(self, lo: int, hi: int):
        """Smallest kept degree in [lo, hi], or None."""
        for l in self.kept:
            if l > hi:
                return None
            if l >= lo:
                return l
        return None

    def solve(self, coeffs: HarmonicCoeffs) -> HarmonicCoeffs:
        """Blockwise inverse on kept degrees, zero elsewhere (including
        degrees beyond the examined range)."""
        out = HarmonicCoeffs(coeffs.lmax)
        for l, b in self.blocks.items():
            if l > coeffs.lmax:
                continue
            src = coeffs.block(l)
            if np.isscalar(b):
                if b == 0.0:
                    raise np.linalg.LinAlgError(f"kept block {l} is zero, cannot solve")
                out.block(l)[:] = src / float(b)
            else:
                out.block(l)[:] = np.linalg.solve(b, src)
        return out


def _screen_block(b, l: int, cutoff: float):
    """Keep/kill one dense block under the invertibility rule; returns
    (kept, smin, smax).  Kept means sigma_min >= cutoff, i.e. the block
    inverse norm does not exceed 1/cutoff.

    Large blocks are first tested against the smallest column norm, an
    upper bound on sigma_min: when even that sits under the floor the
    kill is certified without an SVD.  Everything else is decided by
    exact singular values.
    """
    d = 2 * l + 1
    if d > _EXACT_SVD_DIM:
        min_col = float(np.sqrt((b * b).sum(axis=0).min()))
        if min_col < cutoff:
            return False, 0.0, 0.0
    sv = svdvals(b)
    return sv[-1] >= cutoff, float(sv[-1]), float(sv[0])


def t_op(K_delta: BlockOperator, delta: float, kappa: float, J: int) -> ThresholdedOperator:
    """Screen a (typically noise-perturbed) instrument: a degree up to
    min(2^(J+1), lmax) is kept when its block inverse norm is at most the
    reciprocal of the spectral floor (boundary included), so that solving
    through kept blocks amplifies noise by a controlled factor.  delta = 0
    keeps the whole range untouched."""
    if kappa <= 0:
        raise ValueError("kappa must be > 0")
    upper = min(2 ** (J + 1), K_delta.lmax)
    out = ThresholdedOperator(lmax=upper, delta=delta, kappa=kappa, J=J)
    for l in range(upper + 1):
        b = K_delta.blocks[l]
        cut = spectral_cutoff(l, delta, kappa)
        if b is None:
            if cut == 0.0:
                out.blocks[l] = 0.0
                out.sigma_min[l] = 0.0
                out.sigma_max[l] = 0.0
            continue
        if np.isscalar(b):
            s = abs(float(b))
            if s >= cut:
                out.blocks[l] = float(b)
                out.sigma_min[l] = s
                out.sigma_max[l] = s
            continue
        kept, smin, smax = _screen_block(b, l, cut)
        if kept:
            out.blocks[l] = b
            out.sigma_min[l] = smin
            out.sigma_max[l] = smax
    return out


def threshold_perturbed(
    K: BlockOperator, delta: float, kappa: float, J: int, rng: np.random.Generator
) -> ThresholdedOperator:
    """Fused perturb-then-screen that never materializes killed blocks.

    Draw order matches perturb (ascending degree, row-major), so for any
    degree range both paths see identical noise; only the kept blocks are
    retained, which keeps memory proportional to what survives.
    """
    if delta == 0.0:
        return t_op(K, 0.0, kappa, J)
    upper = min(2 ** (J + 1), K.lmax)
    out = ThresholdedOperator(lmax=upper, delta=delta, kappa=kappa, J=J)
    for l in range(upper + 1):
        d = 2 * l + 1
        g = rng.standard_normal((d, d))
        b = K.blocks[l]
        if b is None:
            m = delta * g
        elif np.isscalar(b):
            m = delta * g
            m[np.diag_indices(d)] += float(b)
        else:
            m = b + delta * g
        kept, smin, smax = _screen_block(m, l, spectral_cutoff(l, delta, kappa))
        if kept:
            out.blocks[l] = m
            out.sigma_min[l] = smin
            out.sigma_max[l] = smax
    return out


@dataclass(frozen=True)
class DipEstimate:
    """Fitted growth of block inverse norms: inverse_norm(l) ~ C l^exponent
    over the fitted degree range."""

    exponent: float
    log_intercept: float
    degrees: np.ndarray
    residual: float

    def inverse_norm_at(self, l) -> float:
        return float(np.exp(self.log_intercept) * np.asarray(l, dtype=float) ** self.exponent)


def estimate_dip(K: BlockOperator, lo: int = 4, hi: int = 64) -> DipEstimate:
    """Least-squares fit of log inverse-norm against log degree.

    The exponent measures how fast the instrument damps fine scales,
    which is what sets attainable convergence rates.  A singular block
    in the fitted range is an error.
    """
    hi = min(hi, K.lmax)
    if hi < lo:
        raise ValueError(f"no degrees in [{lo}, {hi}] to fit")
    ls = np.arange(lo, hi + 1)
    norms = np.empty(ls.size)
    for i, l in enumerate(ls):
        n = block_inverse_norm(K, int(l))
        if not np.isfinite(n):
            raise np.linalg.LinAlgError(f"block {l} is singular in the fit range")
        norms[i] = n
    X = np.column_stack((np.log(ls), np.ones(ls.size)))
    y = np.log(norms)
    coef, res, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = float(np.sqrt(res[0] / ls.size)) if res.size else 0.0
    return DipEstimate(
        exponent=float(coef[0]),
        log_intercept=float(coef[1]),
        degrees=ls,
        residual=resid,
    )


def save_operator(K: BlockOperator, path):
    """Write a block operator to an npz archive: 'lmax' plus one entry
    per nonzero block named block_<l> (scalars as 0-d arrays)."""
    payload = {"lmax": np.asarray(K.lmax)}
    for l, b in enumerate(K.blocks):
        if b is None:
            continue
        payload[f"block_{l}"] = np.asarray(b)
    np.savez(path, **payload)


def load_operator(path) -> BlockOperator:
    """Inverse of save_operator; zero blocks come back as None."""
    with np.load(path) as data:
        if "lmax" not in data:
            raise ValueError(f"{path}: not an operator archive (no lmax entry)")
        lmax = int(data["lmax"])
        blocks = [None] * (lmax + 1)
        for key in data.files:
            if not key.startswith("block_"):
                continue
            l = int(key.split("_", 1)[1])
            if l > lmax:
                raise ValueError(f"{path}: block {l} beyond declared lmax {lmax}")
            arr = data[key]
            blocks[l] = float(arr) if arr.ndim == 0 else arr
    return BlockOperator(lmax, blocks)
