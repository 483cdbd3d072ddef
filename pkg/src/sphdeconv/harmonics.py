"""Real orthonormal spherical harmonics and harmonic-domain transforms.

The basis is indexed by degree l >= 0 and order m in [-l, l]:
positive orders carry cos(m*phi), negative orders sin(|m|*phi), and the
polar part is the associated Legendre function with Condon-Shortley sign,
normalized so the family is orthonormal in L2 of the unit sphere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FOUR_PI = 4.0 * np.pi
_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class SphPoint:
    """A point on the unit sphere, stored both as angles and coordinates.

    theta is the colatitude in [0, pi], phi the longitude in [0, 2*pi).
    """

    theta: float
    phi: float
    xyz: tuple = field(default=None)

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi + 1e-12):
            raise ValueError(f"colatitude out of range: {self.theta}")
        if self.xyz is None:
            st = np.sin(self.theta)
            object.__setattr__(
                self,
                "xyz",
                (st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)),
            )

    @classmethod
    def from_vec(cls, v) -> "SphPoint":
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if not np.isfinite(n) or abs(n - 1.0) > 1e-9:
            raise ValueError(f"not a unit vector (norm {n})")
        v = v / n
        theta = float(np.arccos(np.clip(v[2], -1.0, 1.0)))
        phi = float(np.arctan2(v[1], v[0])) % (2.0 * np.pi)
        return cls(theta, phi, tuple(v))


class HarmonicCoeffs:
    """Coefficients of an expansion in the real orthonormal basis.

    Flat storage of length (lmax+1)^2: degree l occupies the slice
    [l*l, (l+1)*(l+1)), ordered m = -l..l, so entry (l, m) sits at
    l*l + l + m.
    """

    def __init__(self, lmax: int, values=None):
        if lmax < 0:
            raise ValueError("lmax must be >= 0")
        self.lmax = int(lmax)
        n = (self.lmax + 1) ** 2
        if values is None:
            self.values = np.zeros(n)
        else:
            values = np.asarray(values, dtype=float)
            if values.shape != (n,):
                raise ValueError(f"expected {n} values, got {values.shape}")
            self.values = values

    @staticmethod
    def index(l: int, m: int) -> int:
        if not (0 <= l and -l <= m <= l):
            raise ValueError(f"invalid (l, m) = ({l}, {m})")
        return l * l + l + m

    def block(self, l: int):
        """View of the degree-l coefficients, ordered m = -l..l."""
        if not (0 <= l <= self.lmax):
            raise ValueError(f"degree {l} outside [0, {self.lmax}]")
        return self.values[l * l : (l + 1) * (l + 1)]

    def set_block(self, l: int, vec):
        blk = self.block(l)
        vec = np.asarray(vec, dtype=float)
        if vec.shape != blk.shape:
            raise ValueError(f"block {l} expects length {blk.size}")
        blk[:] = vec

    def l2(self) -> float:
        return float(np.linalg.norm(self.values))

    def copy(self) -> "HarmonicCoeffs":
        return HarmonicCoeffs(self.lmax, self.values.copy())

    def padded(self, lmax: int) -> "HarmonicCoeffs":
        """Zero-extend (or truncate-check) to a new maximum degree."""
        if lmax == self.lmax:
            return self
        if lmax < self.lmax:
            tail = self.values[(lmax + 1) ** 2 :]
            if np.any(tail != 0.0):
                raise ValueError("cannot shrink: nonzero content above requested lmax")
            return HarmonicCoeffs(lmax, self.values[: (lmax + 1) ** 2].copy())
        out = HarmonicCoeffs(lmax)
        out.values[: self.values.size] = self.values
        return out

    def max_nonzero_degree(self) -> int:
        """Largest degree carrying a nonzero coefficient (0 if none)."""
        nz = np.nonzero(self.values)[0]
        if nz.size == 0:
            return 0
        return int(np.floor(np.sqrt(nz[-1])))

    def __eq__(self, other):
        return (
            isinstance(other, HarmonicCoeffs)
            and self.lmax == other.lmax
            and np.array_equal(self.values, other.values)
        )


def eval_legendre(l: int, m: int, t):
    """Associated Legendre function P_l^m(t), Condon-Shortley sign included.

    Computed by the stable upward recurrence in degree.  Values are the
    classical (unnormalized) ones, so magnitudes grow like (l+m)! and
    overflow float64 once l and m are both of order a few hundred; the
    transforms below use the normalized recurrence instead and have no
    such limit in the degrees handled here.
    """
    if not (0 <= m <= l):
        raise ValueError(f"need 0 <= m <= l, got (l, m) = ({l}, {m})")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-14):
        raise ValueError("argument outside [-1, 1]")
    scalar = t.ndim == 0
    t = np.atleast_1d(t)

    # seed: P_m^m = (-1)^m (2m-1)!! (1-t^2)^(m/2)
    pmm = np.ones_like(t)
    if m > 0:
        somx2 = np.sqrt(np.maximum(0.0, (1.0 - t) * (1.0 + t)))
        fact = 1.0
        for _ in range(m):
            pmm *= -fact * somx2
            fact += 2.0
    if l == m:
        return float(pmm[0]) if scalar else pmm
    pmmp1 = t * (2 * m + 1) * pmm
    if l == m + 1:
        return float(pmmp1[0]) if scalar else pmmp1
    for ll in range(m + 2, l + 1):
        pll = (t * (2 * ll - 1) * pmmp1 - (ll + m - 1) * pmm) / (ll - m)
        pmm, pmmp1 = pmmp1, pll
    return float(pmmp1[0]) if scalar else pmmp1


def norm_legendre_rows(lmax: int, x):
    """Yield (l, P) sweeping degrees 0..lmax, where P[m] holds the
    orthonormal polar factor for order m <= l at the points x = cos(theta).

    P is sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) * P_l^m(x), the polar part of
    the basis up to the sqrt(2) azimuthal factor.  The same three buffers
    rotate through the sweep, so consume each row before advancing.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    sint = np.sqrt(np.maximum(0.0, (1.0 - x) * (1.0 + x)))
    bufs = [np.zeros((lmax + 1, n)) for _ in range(3)]
    prev, prev2, scratch = bufs
    prev[0] = 1.0 / np.sqrt(FOUR_PI)
    yield 0, prev
    for l in range(1, lmax + 1):
        m = np.arange(l, dtype=float)
        lf = float(l)
        alpha = np.sqrt((4.0 * lf * lf - 1.0) / (lf * lf - m * m))
        # the m = l-1 term has a zero numerator, which silences the stale
        # row it would otherwise read from the rotating buffer
        beta = np.sqrt(
            (2.0 * lf + 1.0)
            * (lf - 1.0 - m)
            * (lf - 1.0 + m)
            / ((2.0 * lf - 3.0) * (lf * lf - m * m))
        )
        np.multiply(x, prev[:l], out=scratch[:l])
        scratch[:l] *= alpha[:, None]
        scratch[:l] -= beta[:, None] * prev2[:l]
        scratch[l] = (-np.sqrt((2.0 * lf + 1.0) / (2.0 * lf))) * sint * prev[l - 1]
        prev2, prev, scratch = prev, scratch, prev2
        yield l, prev


def eval_sh(l: int, m: int, p: SphPoint) -> float:
    """One real orthonormal basis function at one point."""
    if not (-l <= m <= l):
        raise ValueError(f"invalid (l, m) = ({l}, {m})")
    x = np.array([np.cos(p.theta)])
    for ll, rows in norm_legendre_rows(l, x):
        if ll == l:
            pol = rows[abs(m), 0]
            break
    if m == 0:
        return float(pol)
    if m > 0:
        return float(_SQRT2 * pol * np.cos(m * p.phi))
    return float(_SQRT2 * pol * np.sin(-m * p.phi))


def legendre_kernel(l: int, t):
    """Degree-l reproducing kernel (2l+1)/(4 pi) P_l(t) of the projector
    onto the degree-l harmonic subspace, as a function of the inner
    product t of its two arguments."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    p_prev = np.ones_like(t)
    p = t.copy()
    if l == 0:
        p = p_prev
    else:
        for ll in range(2, l + 1):
            p_prev, p = p, ((2 * ll - 1) * t * p - (ll - 1) * p_prev) / ll
    out = (2 * l + 1) / FOUR_PI * p
    return float(out[0]) if scalar else out


def legendre_table(lmax: int, t):
    """P_l(t) for all degrees 0..lmax, shape (lmax+1, len(t))."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty((lmax + 1, t.size))
    out[0] = 1.0
    if lmax >= 1:
        out[1] = t
    for l in range(2, lmax + 1):
        out[l] = ((2 * l - 1) * t * out[l - 1] - (l - 1) * out[l - 2]) / l
    return out


# ---------------------------------------------------------------------------
# transforms

def _require_exactness(quad, lmax):
    if quad.degree is None:
        raise ValueError("point set has no certified exactness degree")
    if quad.degree < 2 * lmax:
        raise ValueError(
            f"cubature exact to degree {quad.degree} cannot project onto "
            f"degrees up to {lmax} (needs {2 * lmax})"
        )


def _analyze_core(x_nodes, gc, gs, lmax):
    # gc[m, i] carries the cos(m phi)-weighted data folded per polar node,
    # gs the sin side; contraction against the polar rows gives the block.
    out = HarmonicCoeffs(lmax)
    for l, rows in norm_legendre_rows(lmax, x_nodes):
        blk = out.block(l)
        cos_part = np.einsum("mi,mi->m", rows[: l + 1], gc[: l + 1])
        blk[l] = cos_part[0]
        if l > 0:
            blk[l + 1 :] = _SQRT2 * cos_part[1:]
            sin_part = np.einsum("mi,mi->m", rows[1 : l + 1], gs[1 : l + 1])
            blk[:l] = _SQRT2 * sin_part[::-1]
    return out


def _trig_matrices(lmax, phis):
    m = np.arange(lmax + 1)
    ang = np.outer(m, phis)
    return np.cos(ang), np.sin(ang)


def grid_analyze(values, lmax: int, grid):
    """Project gridded samples (n_theta, n_phi) onto degrees <= lmax.

    The grid is a product rule: Gauss-Legendre in cos(theta) times
    equispaced longitudes.  Cost is O(lmax^2 n_theta + lmax n_theta n_phi).
    """
    values = np.asarray(values, dtype=float)
    n_phi = grid.phis.size
    cosm, sinm = _trig_matrices(lmax, grid.phis)
    scale = 2.0 * np.pi / n_phi
    fc = (values @ cosm.T).T * scale  # (lmax+1, n_theta)
    fs = (values @ sinm.T).T * scale
    fc *= grid.gl_w
    fs *= grid.gl_w
    return _analyze_core(grid.gl_x, fc, fs, lmax)


def grid_synthesize(coeffs: HarmonicCoeffs, grid):
    """Evaluate a band-limited expansion on a product grid; inverse of
    grid_analyze when the grid resolves the band."""
    lmax = coeffs.lmax
    n_theta = grid.gl_x.size
    amp_c = np.zeros((lmax + 1, n_theta))
    amp_s = np.zeros((lmax + 1, n_theta))
    for l, rows in norm_legendre_rows(lmax, grid.gl_x):
        blk = coeffs.block(l)
        w = np.empty(l + 1)
        w[0] = blk[l]
        if l > 0:
            w[1:] = _SQRT2 * blk[l + 1 :]
            amp_s[1 : l + 1] += (_SQRT2 * blk[:l][::-1])[:, None] * rows[1 : l + 1]
        amp_c[: l + 1] += w[:, None] * rows[: l + 1]
    cosm, sinm = _trig_matrices(lmax, grid.phis)
    return amp_c.T @ cosm + amp_s.T @ sinm


def points_analyze(values, weights, thetas, phis, lmax: int):
    """Weighted projection from scattered nodes (generic cubature)."""
    values = np.asarray(values, dtype=float)
    wv = np.asarray(weights, dtype=float) * values
    cosm, sinm = _trig_matrices(lmax, np.asarray(phis, dtype=float))
    gc = cosm * wv
    gs = sinm * wv
    return _analyze_core(np.cos(np.asarray(thetas, dtype=float)), gc, gs, lmax)


def points_synthesize(coeffs: HarmonicCoeffs, thetas, phis):
    """Evaluate a band-limited expansion at scattered points."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    lmax = coeffs.lmax
    cosm, sinm = _trig_matrices(lmax, phis)
    out = np.zeros(thetas.size)
    for l, rows in norm_legendre_rows(lmax, np.cos(thetas)):
        blk = coeffs.block(l)
        w = np.empty(l + 1)
        w[0] = blk[l]
        if l > 0:
            w[1:] = _SQRT2 * blk[l + 1 :]
            out += np.einsum(
                "mi,mi->i",
                (_SQRT2 * blk[:l][::-1])[:, None] * rows[1 : l + 1],
                sinm[1 : l + 1],
            )
        out += np.einsum("mi,mi->i", w[:, None] * rows[: l + 1], cosm[: l + 1])
    return out


def analyze(f, lmax: int, quad) -> HarmonicCoeffs:
    """Coefficients of the projection of f onto degrees <= lmax.

    f may be a callable f(theta, phi) accepting arrays, or an array of
    samples aligned with the cubature nodes.  The rule must be exact to
    degree 2*lmax so that basis products integrate exactly; for band-
    limited f within that budget the projection is exact, otherwise the
    rule's accuracy on f times the basis governs the aliasing error.
    """
    _require_exactness(quad, lmax)
    g = quad.grid
    if callable(f):
        if g is not None:
            th = np.arccos(np.clip(g.gl_x, -1.0, 1.0))
            return grid_analyze(f(th[:, None], g.phis[None, :]), lmax, g)
        return points_analyze(f(quad.thetas, quad.phis), quad.weights,
                              quad.thetas, quad.phis, lmax)
    values = np.asarray(f, dtype=float)
    if g is not None and values.shape == (g.gl_x.size, g.phis.size):
        return grid_analyze(values, lmax, g)
    values = values.reshape(-1)
    if values.size != quad.weights.size:
        raise ValueError("sample array does not match the cubature nodes")
    return points_analyze(values, quad.weights, quad.thetas, quad.phis, lmax)


def synthesize(coeffs: HarmonicCoeffs, p: SphPoint) -> float:
    """Value of the expansion at a single point."""
    return float(points_synthesize(coeffs, [p.theta], [p.phi])[0])


def sh_design_matrix(lmax: int, thetas, phis):
    """Matrix of basis values, shape (n_points, (lmax+1)^2); column order
    follows HarmonicCoeffs.index."""
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    n = thetas.size
    out = np.empty((n, (lmax + 1) ** 2))
    cosm, sinm = _trig_matrices(lmax, phis)
    for l, rows in norm_legendre_rows(lmax, np.cos(thetas)):
        base = l * l
        out[:, base + l] = rows[0]
        for m in range(1, l + 1):
            out[:, base + l + m] = _SQRT2 * rows[m] * cosm[m]
            out[:, base + l - m] = _SQRT2 * rows[m] * sinm[m]
    return out
