"""Synthetic inputs for the deconvolution experiments.

Produces target densities on the sphere, blockwise white-noise
observations of a convolved target, and complete seeded fixtures
(target, instrument, observation, perturbed instrument) so that every
experiment is reproducible from one integer seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .harmonics import FOUR_PI, HarmonicCoeffs, SphPoint, analyze
from .operators import BlockOperator, perturb, rosenthal
from .quadrature import product_rule

_SPIKE_CENTER = (0.0, 1.0, 0.0)
_SPIKE_NORM = 0.6729

# projection coefficients per (kind, center, normalizer, lmax); shared
# across replicates since the study reuses one target many times
_COEFF_CACHE = {}


class TargetDensity:
    """A probability density on the unit sphere.

    kind "exp_spike" is exp(-2 |omega - center|_l1) / normalizer with the
    coordinatewise l1 distance in R^3; "uniform" is 1/(4 pi); "custom"
    wraps given band-limited coefficients.
    """

    def __init__(self, kind: str, center=_SPIKE_CENTER, normalizer: float = _SPIKE_NORM,
                 coeffs: HarmonicCoeffs = None):
        if kind not in ("exp_spike", "uniform", "custom"):
            raise ValueError(f"unknown target kind {kind!r}")
        if kind == "custom" and coeffs is None:
            raise ValueError("custom target needs coefficients")
        self.kind = kind
        self.center = tuple(float(c) for c in center)
        self.normalizer = float(normalizer)
        self._custom = coeffs

    def __call__(self, thetas, phis):
        """Density values at angle arrays (broadcasting like the inputs)."""
        thetas = np.asarray(thetas, dtype=float)
        phis = np.asarray(phis, dtype=float)
        if self.kind == "uniform":
            return np.broadcast_to(1.0 / FOUR_PI, np.broadcast(thetas, phis).shape).copy()
        if self.kind == "custom":
            from .harmonics import points_synthesize

            shape = np.broadcast(thetas, phis).shape
            t, p = np.broadcast_arrays(thetas, phis)
            return points_synthesize(self._custom, t.ravel(), p.ravel()).reshape(shape)
        st = np.sin(thetas)
        x = st * np.cos(phis)
        y = st * np.sin(phis)
        z = np.cos(thetas)
        cx, cy, cz = self.center
        d1 = np.abs(x - cx) + np.abs(y - cy) + np.abs(z - cz)
        return np.exp(-2.0 * d1) / self.normalizer

    def at(self, p: SphPoint) -> float:
        return float(self(np.asarray(p.theta), np.asarray(p.phi)))

    def coeffs(self, lmax: int) -> HarmonicCoeffs:
        """Projection onto degrees <= lmax (cached per target and lmax)."""
        if self.kind == "custom":
            if self._custom.lmax > lmax:
                raise ValueError("custom target exceeds requested band")
            return self._custom.padded(lmax)
        if self.kind == "uniform":
            out = HarmonicCoeffs(lmax)
            out.values[0] = 1.0 / np.sqrt(FOUR_PI)
            return out
        key = (self.kind, self.center, self.normalizer, lmax)
        if key not in _COEFF_CACHE:
            _COEFF_CACHE[key] = analyze(self, lmax, product_rule(2 * lmax))
        return _COEFF_CACHE[key].copy()


def target_density(kind: str, point: SphPoint) -> float:
    """Convenience pointwise evaluation of a named target."""
    return TargetDensity(kind).at(point)


@dataclass(frozen=True)
class Observation:
    """Noisy blockwise observation of a convolved target."""

    g: HarmonicCoeffs
    eps: float
    seed: object = None


def observe_signal(f: HarmonicCoeffs, K: BlockOperator, eps: float,
                   rng: np.random.Generator, seed=None) -> Observation:
    """Convolve f through K and add white coefficient noise of level eps.

    The noise is one flat standard-normal draw over all coefficients up
    to f's band, so a fixed generator state fixes the observation.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    g = K.apply(f)
    if eps > 0:
        g.values += eps * rng.standard_normal(g.values.size)
    return Observation(g=g, eps=eps, seed=seed)


@dataclass(frozen=True)
class FixtureConfig:
    """Everything needed to regenerate one experiment input."""

    delta: float
    eps: float
    seed: int
    lmax: int
    alpha: float = np.pi
    nu: float = 1.0
    target: str = "exp_spike"

    @classmethod
    def from_file(cls, path) -> "FixtureConfig":
        """Read a JSON config with keys delta, eps, seed, lmax and
        optional alpha, nu, target."""
        with open(path) as fh:
            raw = json.load(fh)
        required = {"delta", "eps", "seed", "lmax"}
        missing = required - raw.keys()
        if missing:
            raise ValueError(f"{path}: missing config keys {sorted(missing)}")
        known = required | {"alpha", "nu", "target"}
        unknown = raw.keys() - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        return cls(**raw)

    def to_file(self, path):
        with open(path, "w") as fh:
            json.dump(
                {
                    "delta": self.delta,
                    "eps": self.eps,
                    "seed": self.seed,
                    "lmax": self.lmax,
                    "alpha": self.alpha,
                    "nu": self.nu,
                    "target": self.target,
                },
                fh,
                indent=2,
            )
            fh.write("\n")


def fixture_streams(seed):
    """The two independent generator streams of a fixture: operator
    noise first, signal noise second.  Accepts an integer or an already
    spawned SeedSequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    op_ss, sig_ss = seed.spawn(2)
    return np.random.default_rng(op_ss), np.random.default_rng(sig_ss)


def make_fixture(config: FixtureConfig):
    """Build the full experiment input for one seed.

    Returns (target, instrument, observation, perturbed instrument).
    The target is banded by projection at config.lmax before
    convolution; operator and signal noises come from disjoint streams
    spawned off the one seed.  Note the perturbed instrument is dense:
    every block materializes, so large lmax costs O(lmax^3) memory.
    """
    target = TargetDensity(config.target)
    K = rosenthal(config.alpha, config.nu, config.lmax)
    f = target.coeffs(config.lmax)
    op_rng, sig_rng = fixture_streams(config.seed)
    Kd = perturb(K, config.delta, op_rng)
    obs = observe_signal(f, K, config.eps, sig_rng, seed=config.seed)
    return target, K, obs, Kd
