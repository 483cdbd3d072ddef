"""Dyadic needlet frames on the sphere.

A frame is built from a smooth dyadic window: level j collects the
degrees between 2^(j-1) and 2^(j+1)-1, filtered by the window and
sampled at the nodes of a cubature rule that resolves products of two
level-j kernels.  Frame coefficients are weighted point evaluations of
the filtered function, so analysis and synthesis both reduce to the
harmonic transforms.
"""

from __future__ import annotations

import numpy as np

from .harmonics import (
    FOUR_PI,
    HarmonicCoeffs,
    grid_analyze,
    grid_synthesize,
    legendre_table,
    points_analyze,
    points_synthesize,
)
from .quadrature import level_cubature

_GL_ORDER = 128
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)


def _bump_values(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / ((1.0 - ti) * (1.0 + ti)))
    return out


_BUMP_NORM = float(_bump_values(_GL_X) @ _GL_W)


def _ramp(u):
    """Smooth monotone ramp from 0 at u <= 0 to 1 at u >= 1, built by
    integrating the standard compactly supported bump."""
    u = np.asarray(u, dtype=float)
    c = np.clip(2.0 * u - 1.0, -1.0, 1.0)
    half = (c + 1.0) / 2.0
    t = half[..., None] * (_GL_X + 1.0) - 1.0
    return (_bump_values(t) @ _GL_W) * half / _BUMP_NORM


def window_a(x):
    """Low-pass profile: 1 on [0, 1/2], 0 on [1, inf), smooth between."""
    x = np.abs(np.asarray(x, dtype=float))
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.ones_like(x)
    out[x >= 1.0] = 0.0
    mid = (x > 0.5) & (x < 1.0)
    if np.any(mid):
        out[mid] = 1.0 - _ramp(2.0 * x[mid] - 1.0)
    return float(out[0]) if scalar else out


def window_b(x):
    """Band-pass profile sqrt(a(x/2) - a(x)), supported on [1/2, 2];
    its squares over dyadic dilates telescope to a partition of unity."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    diff = window_a(x / 2.0) - window_a(x)
    out = np.sqrt(np.maximum(diff, 0.0))
    return float(out[0]) if scalar else out


def band_range(j: int):
    """Degrees with possibly nonzero level-j weight: [2^(j-1), 2^(j+1)-1]
    intersected with l >= 1 (degree 0 lives in the separate scalar channel)."""
    if j < 0:
        raise ValueError("level must be >= 0")
    lo = max(1, 2 ** (j - 1)) if j > 0 else 1
    hi = 2 ** (j + 1) - 1
    return lo, hi


class NeedletFrame:
    """Window weights, bands, and per-level cubature for levels 0..J,
    plus the degree-0 scalar channel handled outside the levels."""

    def __init__(self, J: int, oversample: float = 1.0):
        if J < 0:
            raise ValueError("top level must be >= 0")
        self.J = int(J)
        self.oversample = float(oversample)
        self.bands = []
        self.bweights = []
        self.cubatures = []
        for j in range(self.J + 1):
            lo, hi = band_range(j)
            ls = np.arange(lo, hi + 1)
            self.bands.append((lo, hi))
            self.bweights.append(window_b(ls / float(2 ** j)))
            self.cubatures.append(level_cubature(j, oversample))
        self.lmax = 2 ** (self.J + 1) - 1

    def coverage_weight(self, l):
        """Harmonic multiplier of the frame's reconstruction operator,
        a(l / 2^(J+1)): identically 1 through degree 2^J, fading to 0 at
        the frame edge.  The scalar channel (l = 0) always has weight 1."""
        return window_a(np.asarray(l, dtype=float) / float(2 ** (self.J + 1)))

    def level_size(self, j: int) -> int:
        return len(self.cubatures[j])


class NeedletCoeffs:
    """Frame coefficients: one scalar for degree 0 and one array per
    level, aligned with the frame's cubature nodes."""

    def __init__(self, J: int, scalar: float, levels):
        self.J = int(J)
        self.scalar = float(scalar)
        self.levels = [np.asarray(v, dtype=float) for v in levels]
        if len(self.levels) != self.J + 1:
            raise ValueError(f"expected {self.J + 1} level arrays")

    def level(self, j: int):
        return self.levels[j]

    def copy(self) -> "NeedletCoeffs":
        return NeedletCoeffs(self.J, self.scalar, [v.copy() for v in self.levels])

    def total_size(self) -> int:
        return 1 + sum(v.size for v in self.levels)


def build_frame(J: int, oversample: float = 1.0) -> NeedletFrame:
    return NeedletFrame(J, oversample)


def _filtered_coeffs(coeffs: HarmonicCoeffs, frame: NeedletFrame, j: int):
    """Band-limit coeffs to level j's band with the window applied, or
    None when the band lies entirely above the input's degrees."""
    lo, hi = frame.bands[j]
    if lo > coeffs.lmax:
        return None
    top = min(hi, coeffs.lmax)
    out = HarmonicCoeffs(top)
    bw = frame.bweights[j]
    for l in range(lo, top + 1):
        w = bw[l - lo]
        if w != 0.0:
            out.block(l)[:] = w * coeffs.block(l)
    return out


def needlet_analyze(coeffs: HarmonicCoeffs, frame: NeedletFrame) -> NeedletCoeffs:
    """Frame coefficients of a band-limited function.

    The level-j coefficient at node eta is sqrt(weight_eta) times the
    window-filtered function evaluated at eta.  Degrees above the frame's
    range are rejected; degrees above a band simply don't reach it.
    """
    if coeffs.lmax > frame.lmax:
        raise ValueError(
            f"input degrees up to {coeffs.lmax} exceed the frame range {frame.lmax}"
        )
    scalar = float(coeffs.values[0])
    levels = []
    for j in range(frame.J + 1):
        quad = frame.cubatures[j]
        filt = _filtered_coeffs(coeffs, frame, j)
        if filt is None:
            levels.append(np.zeros(len(quad)))
            continue
        if quad.grid is not None:
            vals = grid_synthesize(filt, quad.grid).reshape(-1)
        else:
            vals = points_synthesize(filt, quad.thetas, quad.phis)
        levels.append(np.sqrt(quad.weights) * vals)
    return NeedletCoeffs(frame.J, scalar, levels)


def needlet_synthesize(nc: NeedletCoeffs, frame: NeedletFrame) -> HarmonicCoeffs:
    """Sum of the frame elements weighted by the given coefficients,
    returned in the harmonic basis (degrees up to the frame range)."""
    if nc.J != frame.J:
        raise ValueError("coefficient levels do not match the frame")
    out = HarmonicCoeffs(frame.lmax)
    out.values[0] = nc.scalar
    for j in range(frame.J + 1):
        beta = nc.levels[j]
        if not np.any(beta):
            continue
        quad = frame.cubatures[j]
        lo, hi = frame.bands[j]
        # beta / sqrt(w) analyzed against the rule recovers the filtered
        # synthesis exactly: the rule resolves products of two band kernels
        h = beta / np.sqrt(quad.weights)
        if quad.grid is not None:
            g = quad.grid
            contrib = grid_analyze(h.reshape(g.gl_x.size, g.phis.size), hi, g)
        else:
            contrib = points_analyze(h, quad.weights, quad.thetas, quad.phis, hi)
        bw = frame.bweights[j]
        for l in range(lo, hi + 1):
            w = bw[l - lo]
            if w != 0.0:
                out.block(l)[:] += w * contrib.block(l)
    return out


def localization_profile(frame: NeedletFrame, j: int, distances, node: int = None):
    """|psi_{j,eta}| along geodesic distance from its center.

    The frame element is zonal about its node, so the profile is the
    windowed Legendre sum times the node's sqrt-weight.  node picks which
    center's weight to use; default is the one with the median weight.
    """
    quad = frame.cubatures[j]
    if node is None:
        node = int(np.argsort(quad.weights)[len(quad) // 2])
    lam = quad.weights[node]
    lo, hi = frame.bands[j]
    d = np.atleast_1d(np.asarray(distances, dtype=float))
    table = legendre_table(hi, np.cos(d))
    ls = np.arange(lo, hi + 1)
    kernel = ((2 * ls + 1) / FOUR_PI * frame.bweights[j]) @ table[lo:]
    return np.sqrt(lam) * np.abs(kernel)


def besov_norm(nc: NeedletCoeffs, smoothness: float, p: float, r: float) -> float:
    """Sequence-space smoothness norm of frame coefficients: the l^r norm
    over levels of 2^(j (smoothness + 2 (1/2 - 1/p))) times the level's
    l^p norm.  The scalar channel is excluded.  r = inf takes the sup."""
    if p <= 0 or r <= 0:
        raise ValueError("p and r must be positive")
    terms = []
    for j in range(nc.J + 1):
        lvl = np.abs(nc.levels[j])
        lp = float(np.sum(lvl ** p) ** (1.0 / p)) if lvl.size else 0.0
        terms.append(2.0 ** (j * (smoothness + 2.0 * (0.5 - 1.0 / p))) * lp)
    terms = np.asarray(terms)
    if np.isinf(r):
        return float(terms.max(initial=0.0))
    return float(np.sum(terms ** r) ** (1.0 / r))
