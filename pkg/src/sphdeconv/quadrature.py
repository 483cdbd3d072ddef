"""Cubature rules on the unit sphere.

A rule is a finite node set with positive weights summing to the sphere
area, together with the polynomial degree it integrates exactly.  The
workhorse is the product rule (Gauss-Legendre in the polar direction,
equispaced longitudes); arbitrary rules can be loaded from text files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harmonics import FOUR_PI, SphPoint, norm_legendre_rows

_MOMENT_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Product structure of a rule: polar nodes/weights in x = cos(theta)
    plus equispaced longitudes."""

    gl_x: np.ndarray
    gl_w: np.ndarray
    phis: np.ndarray


class CubatureSet:
    """Nodes, weights, and certified exactness degree of a cubature rule."""

    def __init__(self, thetas, phis, weights, degree, grid: GridSpec = None):
        self.thetas = np.asarray(thetas, dtype=float)
        self.phis = np.asarray(phis, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        if not (self.thetas.shape == self.phis.shape == self.weights.shape):
            raise ValueError("node and weight arrays must share one shape")
        # degree None marks a point set with no certified exactness
        self.degree = None if degree is None else int(degree)
        self.grid = grid
        st = np.sin(self.thetas)
        self.xyz = np.column_stack(
            (st * np.cos(self.phis), st * np.sin(self.phis), np.cos(self.thetas))
        )
        self._nodes = None

    def __len__(self):
        return self.weights.size

    @property
    def nodes(self):
        """Nodes as SphPoint objects (built on first access)."""
        if self._nodes is None:
            self._nodes = [
                SphPoint(float(t), float(p), tuple(v))
                for t, p, v in zip(self.thetas, self.phis, self.xyz)
            ]
        return self._nodes

    def integrate(self, f) -> float:
        """Apply the rule to a callable f(theta, phi) or a sample array."""
        v = f(self.thetas, self.phis) if callable(f) else np.asarray(f, dtype=float)
        if v.shape != self.weights.shape:
            raise ValueError("samples do not match the rule's nodes")
        return float(self.weights @ v)

    def moment_defects(self, lmax: int):
        """max_m |sum_n w_n Y_{l,m}(node_n)| for each degree 1..lmax,
        plus the degree-0 defect |sum w - 4 pi| / sqrt(4 pi) in slot 0.

        A rule is exact to degree t iff the first t+1 entries vanish,
        since exactness is equivalent to matching the basis moments.
        """
        out = np.empty(lmax + 1)
        out[0] = abs(self.weights.sum() - FOUR_PI) / np.sqrt(FOUR_PI)
        if lmax == 0:
            return out
        w = self.weights
        ang = np.arange(lmax + 1)[:, None] * self.phis[None, :]
        cosm_w = np.cos(ang) * w
        sinm_w = np.sin(ang) * w
        for l, rows in norm_legendre_rows(lmax, np.cos(self.thetas)):
            if l == 0:
                continue
            c = np.einsum("mi,mi->m", rows[: l + 1], cosm_w[: l + 1])
            s = np.einsum("mi,mi->m", rows[1 : l + 1], sinm_w[1 : l + 1])
            out[l] = np.sqrt(2.0) * max(np.abs(c[1:]).max(initial=0.0),
                                        np.abs(s).max(initial=0.0))
            out[l] = max(out[l], abs(c[0]))
        return out

    def verify_degree(self, t: int, tol: float = _MOMENT_TOL) -> bool:
        return bool(np.all(self.moment_defects(t) <= tol))


def product_rule(t: int) -> CubatureSet:
    """Product rule exact for all spherical polynomials of degree <= t.

    ceil((t+1)/2) Gauss-Legendre polar nodes handle the zonal average
    (a polynomial of degree <= t in cos theta), and t+1 equispaced
    longitudes kill every surviving azimuthal frequency.
    """
    if t < 0:
        raise ValueError("degree must be >= 0")
    n_theta = (t + 2) // 2 if t > 0 else 1
    n_phi = t + 1
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    phis = 2.0 * np.pi * np.arange(n_phi) / n_phi
    grid = GridSpec(gl_x=x, gl_w=wx, phis=phis)
    th = np.arccos(np.clip(x, -1.0, 1.0))
    thetas = np.repeat(th, n_phi)
    phis_flat = np.tile(phis, n_theta)
    weights = np.repeat(wx * (2.0 * np.pi / n_phi), n_phi)
    return CubatureSet(thetas, phis_flat, weights, degree=t, grid=grid)


def level_cubature(j: int, oversample: float = 1.0) -> CubatureSet:
    """Node set resolving products of two band-limited kernels whose
    degrees live in the dyadic band of level j (top degree 2^(j+1) - 1).

    oversample > 1 raises the exactness degree proportionally, thinning
    the per-node synthesis weights without changing what is resolved.
    """
    if j < 0:
        raise ValueError("level must be >= 0")
    if oversample < 1.0:
        raise ValueError("oversample must be >= 1")
    base = 2 ** (j + 2) - 2
    t = int(np.ceil(oversample * base))
    return product_rule(t)


def _scan_degree(rule: CubatureSet, tol: float) -> int:
    # N nodes cannot be exact much past t ~ sqrt(3N), so the scan cap is safe
    cap = int(np.ceil(2.0 * np.sqrt(len(rule)))) + 4
    defects = rule.moment_defects(cap)
    if defects[0] > 1e-6:
        raise ValueError("weights do not sum to the sphere area")
    bad = np.nonzero(defects > tol)[0]
    return int(bad[0] - 1) if bad.size else cap


def load_pointset(path) -> CubatureSet:
    """Read a cubature rule from a text file of "x y z w" lines.

    Blank lines and '#' comments are skipped.  An optional header comment
    "# degree: t" asserts the exactness degree, which is then verified
    (a failure is an error); without it the degree is measured by scanning
    basis moments upward until they stop vanishing.  Nodes must be unit
    vectors to about 1e-8 and are snapped onto the sphere.
    """
    claimed = None
    rows = []
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s[1:].strip()
                if body.lower().startswith("degree:"):
                    try:
                        claimed = int(body.split(":", 1)[1])
                    except ValueError:
                        raise ValueError(f"{path}: line {ln}: bad degree header: {s!r}")
                continue
            parts = s.split()
            if len(parts) != 4:
                raise ValueError(
                    f"{path}: line {ln}: expected 'x y z w', got {len(parts)} fields"
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise ValueError(f"{path}: line {ln}: non-numeric field in {s!r}")
    if not rows:
        raise ValueError(f"{path}: no nodes found")
    arr = np.asarray(rows)
    vecs, w = arr[:, :3], arr[:, 3]
    norms = np.linalg.norm(vecs, axis=1)
    off = np.nonzero(np.abs(norms - 1.0) > 1e-8)[0]
    if off.size:
        raise ValueError(
            f"{path}: node {off[0] + 1} is off the unit sphere (norm {norms[off[0]]:.12g})"
        )
    vecs = vecs / norms[:, None]
    thetas = np.arccos(np.clip(vecs[:, 2], -1.0, 1.0))
    phis = np.arctan2(vecs[:, 1], vecs[:, 0]) % (2.0 * np.pi)
    rule = CubatureSet(thetas, phis, w, degree=0)
    if claimed is not None:
        defects = rule.moment_defects(claimed)
        bad = np.nonzero(defects > _MOMENT_TOL)[0]
        if bad.size:
            raise ValueError(
                f"{path}: claims degree {claimed} but the degree-{bad[0]} "
                f"moment defect is {defects[bad[0]]:.3g}"
            )
        rule.degree = claimed
    else:
        rule.degree = _scan_degree(rule, _MOMENT_TOL)
    return rule
