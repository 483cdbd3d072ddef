"""Thresholded deconvolution estimators.

Both estimators share the same front end: screen the perturbed
instrument blockwise, invert the surviving blocks against the observed
coefficients, and zero the rest.  The needlet estimator then analyzes
the blockwise solution in a needlet frame, applies a hard per-level
threshold, and resynthesizes; the plain blockwise estimator stops after
the inversion.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .harmonics import HarmonicCoeffs
from .needlets import NeedletCoeffs, NeedletFrame, needlet_analyze, needlet_synthesize
from .operators import BlockOperator, ThresholdedOperator, t_op


def max_level(eps: float, delta: float, lam: float = 1.0) -> int:
    """Largest usable dyadic level for the given noise pair.

    2^J is lam times the floor of min((eps sqrt|ln eps|)^-1,
    (delta sqrt|ln delta|)^-2), with each term dropped when its noise
    level is zero.  Raises if both levels are zero: the resolution is
    unbounded and the caller must pick J explicitly.
    """
    if eps < 0 or delta < 0:
        raise ValueError("noise levels must be >= 0")
    bounds = []
    if eps > 0:
        bounds.append(1.0 / (eps * math.sqrt(abs(math.log(eps)))))
    if delta > 0:
        bounds.append(1.0 / (delta * math.sqrt(abs(math.log(delta)))) ** 2)
    if not bounds:
        raise ValueError("eps and delta are both zero; pass an explicit level")
    scale = lam * math.floor(min(bounds))
    if scale < 1.0:
        return 0
    return int(math.floor(math.log2(scale)))


@dataclass(frozen=True)
class ThresholdConfig:
    """Tuning constants for one estimation run.

    J defaults to max_level(eps, delta, lam); pass it explicitly to
    override, and always when both noise levels are zero.
    """

    kappa: float
    tau_sig: float
    tau_op: float
    eps: float
    delta: float
    lam: float = 1.0
    J: int = None

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")
        if self.tau_sig < 0 or self.tau_op < 0:
            raise ValueError("tau values must be >= 0")
        if self.J is None:
            object.__setattr__(self, "J", max_level(self.eps, self.delta, self.lam))
        elif self.J < 0:
            raise ValueError("J must be >= 0")


def _noise_terms(eps, delta):
    sig = eps * math.sqrt(abs(math.log(eps))) if eps > 0 else 0.0
    op = delta * math.sqrt(abs(math.log(delta))) if delta > 0 else 0.0
    return sig, op


def signal_threshold(j: int, Ktop: ThresholdedOperator, eps: float, delta: float,
                     tau_sig: float, tau_op: float) -> float:
    """Hard threshold for needlet coefficients at level j.

    Scales the worst kept inverse norm in the level's band by the larger
    of the signal-noise and operator-noise terms; the operator term
    shrinks by 2^(-j/2).  Infinite when the band holds no kept block.
    """
    lo = max(1, 2 ** (j - 1)) if j > 0 else 1
    hi = 2 ** (j + 1) - 1
    lmin = Ktop.min_kept_in(lo, hi)
    if lmin is None:
        return math.inf
    sig, op = _noise_terms(eps, delta)
    level = max(tau_sig * sig, tau_op * (2.0 ** (-j / 2.0)) * op)
    return Ktop.inverse_norm(lmin) * level


def _encode_threshold(s):
    return "inf" if math.isinf(s) else s


def _decode_threshold(s):
    return math.inf if s == "inf" else float(s)


@dataclass
class EstimateResult:
    """Output of one estimation run, serializable to JSON.

    beta_hat holds the unthresholded needlet coefficients; survived
    marks, per level, which of them exceeded the level threshold.  Both
    are None for the plain blockwise estimator.
    """

    method: str
    f_hat: HarmonicCoeffs
    kept_blocks: np.ndarray
    thresholds: list = None
    band_min: list = None
    beta_hat: NeedletCoeffs = None
    survived: list = field(default=None, repr=False)

    def to_json(self, path):
        doc = {
            "method": self.method,
            "lmax": self.f_hat.lmax,
            "f_hat": [self.f_hat.block(l).tolist() for l in range(self.f_hat.lmax + 1)],
            "kept_blocks": [bool(k) for k in self.kept_blocks],
            "thresholds": None
            if self.thresholds is None
            else [_encode_threshold(s) for s in self.thresholds],
            "band_min": self.band_min,
            "beta_hat": None
            if self.beta_hat is None
            else {
                "scalar": float(self.beta_hat.scalar),
                "levels": [lv.tolist() for lv in self.beta_hat.levels],
            },
            "survived": None
            if self.survived is None
            else [[bool(s) for s in lv] for lv in self.survived],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "EstimateResult":
        with open(path) as fh:
            doc = json.load(fh)
        f_hat = HarmonicCoeffs(doc["lmax"])
        for l, blk in enumerate(doc["f_hat"]):
            f_hat.set_block(l, np.asarray(blk, dtype=float))
        beta = None
        if doc.get("beta_hat") is not None:
            levels = [np.asarray(lv, dtype=float) for lv in doc["beta_hat"]["levels"]]
            beta = NeedletCoeffs(
                J=len(levels) - 1, scalar=doc["beta_hat"]["scalar"], levels=levels
            )
        thresholds = doc.get("thresholds")
        if thresholds is not None:
            thresholds = [_decode_threshold(s) for s in thresholds]
        survived = doc.get("survived")
        if survived is not None:
            survived = [np.asarray(lv, dtype=bool) for lv in survived]
        return cls(
            method=doc["method"],
            f_hat=f_hat,
            kept_blocks=np.asarray(doc["kept_blocks"], dtype=bool),
            thresholds=thresholds,
            band_min=doc.get("band_min"),
            beta_hat=beta,
            survived=survived,
        )


def _screened(Kd, cfg) -> ThresholdedOperator:
    if isinstance(Kd, ThresholdedOperator):
        if Kd.J != cfg.J or Kd.delta != cfg.delta or Kd.kappa != cfg.kappa:
            raise ValueError("screened operator disagrees with the config")
        return Kd
    return t_op(Kd, cfg.delta, cfg.kappa, cfg.J)


def bnd_estimate(obs, Kd, cfg: ThresholdConfig, frame: NeedletFrame) -> EstimateResult:
    """Blockwise inversion followed by needlet thresholding.

    Kd may be the perturbed instrument (screened here) or an already
    screened ThresholdedOperator built with the same delta, kappa and J.
    The mean channel passes through its block solve unthresholded.
    """
    if frame.J != cfg.J:
        raise ValueError("frame level disagrees with the config")
    if obs.g.lmax < frame.lmax:
        raise ValueError(
            f"observation band {obs.g.lmax} below the frame band {frame.lmax}"
        )
    Ktop = _screened(Kd, cfg)
    x = Ktop.solve(obs.g)
    if x.lmax > frame.lmax:
        # blocks past the frame band carry zero frame weight
        x = HarmonicCoeffs(frame.lmax, x.values[: (frame.lmax + 1) ** 2])
    top = x.max_nonzero_degree()
    beta = needlet_analyze(HarmonicCoeffs(top, x.values[: (top + 1) ** 2]), frame)

    thresholds = []
    band_min = []
    survived = []
    kept = NeedletCoeffs(
        J=frame.J, scalar=beta.scalar, levels=[lv.copy() for lv in beta.levels]
    )
    for j in range(frame.J + 1):
        s_j = signal_threshold(j, Ktop, cfg.eps, cfg.delta, cfg.tau_sig, cfg.tau_op)
        thresholds.append(s_j)
        lo = max(1, 2 ** (j - 1)) if j > 0 else 1
        band_min.append(Ktop.min_kept_in(lo, 2 ** (j + 1) - 1))
        alive = np.abs(beta.level(j)) > s_j
        survived.append(alive)
        kept.levels[j][~alive] = 0.0

    f_hat = needlet_synthesize(kept, frame)
    mask = np.zeros(f_hat.lmax + 1, dtype=bool)
    for l in Ktop.kept:
        if l <= f_hat.lmax:
            mask[l] = True
    return EstimateResult(
        method="bnd",
        f_hat=f_hat,
        kept_blocks=mask,
        thresholds=thresholds,
        band_min=band_min,
        beta_hat=beta,
        survived=survived,
    )


def bbd_estimate(obs, Kd, cfg: ThresholdConfig) -> EstimateResult:
    """Plain blockwise inversion over the kept blocks, no needlet stage.

    Keeps every solved coefficient as is, so operator screening is its
    only regularization.
    """
    Ktop = _screened(Kd, cfg)
    f_hat = Ktop.solve(obs.g)
    mask = np.zeros(f_hat.lmax + 1, dtype=bool)
    for l in Ktop.kept:
        if l <= f_hat.lmax:
            mask[l] = True
    return EstimateResult(method="bbd", f_hat=f_hat, kept_blocks=mask)
