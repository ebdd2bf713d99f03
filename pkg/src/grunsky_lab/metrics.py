"""Conformal metrics on a disk of deformation parameters.

Each unit coefficient direction x turns the deformed-map family t -> F^t
into a holomorphic function h_x(t) = x^T B(t) x with values in the unit
disk; its Poincare pullback |h'| / (1 - |h|^2) is one member metric.  The
module assembles pointwise envelopes of such metrics over direction
catalogues, certifies curvature <= -4 through a discrete Laplacian of
log lambda, and compares the envelopes against the sup-norm ceiling
k / (1 - |t|^2) of the parameter family.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import maximum_filter

from .beltrami import (chain_invert, chain_rule, first_order_laurent,
                       infinitesimal_grunsky_matrix, teichmuller_norm_bracket)
from .disk import BeltramiField
from .grunsky import grunsky_form, grunsky_matrix, takagi_max_vector

__all__ = [
    "MetricChainError",
    "DeformationGrid",
    "direction_probes",
    "pullback_from_coeffs",
    "pullback_metric",
    "envelope",
    "usc_regularize",
    "generalized_laplacian",
    "curvature_certificate",
    "metric_comparison",
]


class MetricChainError(RuntimeError):
    pass


class DeformationGrid:
    """Square lattice of deformation parameters covering {|t| <= radius}.

    One extra ring of margin keeps five-point stencils valid on every
    point of the closed disk of interest.
    """

    def __init__(self, radius: float = 0.5, spacing: float = 1.0 / 128.0):
        if not 0 < radius < 1:
            raise ValueError("radius must lie in (0, 1)")
        if spacing <= 0 or spacing > radius:
            raise ValueError("spacing must be positive and below the radius")
        self.radius = float(radius)
        self.spacing = float(spacing)
        k = int(np.ceil(radius / spacing)) + 1
        idx = np.arange(-k, k + 1)
        self.t = idx[:, None] * spacing + 1j * idx[None, :] * spacing
        self.mask = np.abs(self.t) <= radius + 1e-12

    @property
    def shape(self) -> tuple[int, int]:
        return self.t.shape


# ---------------------------------------------------------------------------
# direction probes: h_x(t) as polynomials in t


def direction_probes(mu: BeltramiField, xs, order: int) -> np.ndarray:
    """Polynomial coefficients of h_x(t) = x^T B(t) x per direction x.

    B(t) is the Grunsky matrix of the first-order deformed Laurent family,
    polynomial in t of degree at most `order`; coefficients come from 64
    samples on the circle |t| = 3/5 by inverse DFT, exact up to roundoff.
    """
    xs = [np.asarray(x, dtype=complex) for x in xs]
    if any(x.size > order for x in xs):
        raise ValueError("direction longer than the matrix order")
    n_samples = 64
    if order + 1 >= n_samples:
        raise ValueError("order too large for the fixed sample count")
    rho = 0.6
    t_samples = rho * np.exp(2j * np.pi * np.arange(n_samples) / n_samples)
    vals = np.empty((len(xs), n_samples), dtype=complex)
    for j, t in enumerate(t_samples):
        b = grunsky_matrix(first_order_laurent(mu, 2 * order - 1, t), order)
        for i, x in enumerate(xs):
            vals[i, j] = grunsky_form(b, x)
    hat = np.fft.fft(vals, axis=1) / n_samples
    tail = np.max(np.abs(hat[:, order + 1:]))
    lead = max(np.max(np.abs(hat)), 1e-30)
    if tail > 1e-9 * lead:
        raise RuntimeError(
            f"direction polynomial has spurious degree > {order}: tail {tail:.3e}")
    k = np.arange(order + 1)
    out = hat[:, :order + 1] / rho ** k[None, :]
    out[np.abs(out) < 1e-13 * lead] = 0.0
    return out


def pullback_from_coeffs(coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Poincare pullback |h'| / (1 - |h|^2) of a polynomial h at points t."""
    coeffs = np.asarray(coeffs, dtype=complex)
    h = np.polynomial.polynomial.polyval(t, coeffs)
    hp = np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(coeffs))
    mod2 = np.abs(h) ** 2
    if np.any(mod2 >= 1.0):
        raise ValueError("direction function leaves the unit disk on this set")
    return np.abs(hp) / (1.0 - mod2)


def pullback_metric(h_values: np.ndarray, spacing: float) -> dict:
    """Pullback density from lattice samples of a holomorphic h.

    Central differences give the derivative; the conjugate-derivative
    residual measures how far the samples are from holomorphic, and any
    sample with |h| >= 1 is a hard error.  Edge rows and columns carry NaN.
    """
    h = np.asarray(h_values, dtype=complex)
    if h.ndim != 2 or min(h.shape) < 3:
        raise ValueError("need a 2-d array with at least 3 points per axis")
    if np.any(np.abs(h) >= 1.0):
        raise ValueError("|h| >= 1 somewhere: not a map into the disk")
    dx = np.full_like(h, np.nan + 0j)
    dy = np.full_like(h, np.nan + 0j)
    dx[1:-1, :] = (h[2:, :] - h[:-2, :]) / (2.0 * spacing)
    dy[:, 1:-1] = (h[:, 2:] - h[:, :-2]) / (2.0 * spacing)
    # two holomorphic-derivative estimates: d/dx and -i d/dy
    deriv = 0.5 * (dx - 1j * dy)
    disagreement = np.abs(dx + 1j * dy)
    lam = np.abs(deriv) / (1.0 - np.abs(h) ** 2)
    finite = np.isfinite(disagreement)
    residual = float(np.max(disagreement[finite])) if np.any(finite) else float("nan")
    return {"lambda": lam, "derivative": deriv, "dbar_residual": residual}


# ---------------------------------------------------------------------------
# envelopes


def usc_regularize(values: np.ndarray) -> np.ndarray:
    """Upper envelope over 3x3 neighborhoods, an upper-semicontinuous hull."""
    return maximum_filter(values, size=3, mode="nearest")


def envelope(stack, regularize: bool = False) -> np.ndarray:
    """Pointwise maximum over a stack of metric densities."""
    arr = np.asarray(stack, dtype=float)
    if arr.ndim < 2:
        raise ValueError("stack must hold at least one density grid")
    if arr.ndim == 2:
        arr = arr[None, ...]
    with np.errstate(all="ignore"):
        out = np.nanmax(arr, axis=0)
    return usc_regularize(out) if regularize else out


# ---------------------------------------------------------------------------
# circle-mean Laplacian and curvature certificates


def generalized_laplacian(u, node: complex, r_list=(0.04, 0.02, 0.01),
                          n_theta: int = 64, lattice: DeformationGrid | None = None,
                          samples: np.ndarray | None = None) -> dict:
    """Circle-mean Laplacian 4 (mean_r u - u) / r^2 at a point.

    With a callable u the circle averages are trapezoid sums of exact
    samples (exact for quadratics and harmonic functions); with lattice
    samples the circle points are bilinearly interpolated first.  Returns
    the per-radius values, their Richardson combination from the two
    smallest radii, and the conservative minimum.
    """
    r_list = sorted(float(r) for r in r_list)
    if not r_list or r_list[0] <= 0:
        raise ValueError("radii must be positive")
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    ring = np.exp(1j * theta)

    if callable(u):
        u0 = float(np.real(u(np.asarray([node], dtype=complex))[0]))

        def mean_at(r):
            return float(np.mean(np.real(u(node + r * ring))))
    else:
        if lattice is None or samples is None:
            raise ValueError("sample mode needs both lattice and samples")
        samples = np.asarray(samples, dtype=float)
        k = (samples.shape[0] - 1) // 2

        def interp(points):
            fi = np.real(points) / lattice.spacing + k
            fj = np.imag(points) / lattice.spacing + k
            i0 = np.clip(np.floor(fi).astype(int), 0, samples.shape[0] - 2)
            j0 = np.clip(np.floor(fj).astype(int), 0, samples.shape[1] - 2)
            si = fi - i0
            sj = fj - j0
            return ((1 - si) * (1 - sj) * samples[i0, j0]
                    + si * (1 - sj) * samples[i0 + 1, j0]
                    + (1 - si) * sj * samples[i0, j0 + 1]
                    + si * sj * samples[i0 + 1, j0 + 1])

        u0 = float(interp(np.asarray([node], dtype=complex))[0])

        def mean_at(r):
            return float(np.mean(interp(node + r * ring)))

    per_radius = {r: 4.0 * (mean_at(r) - u0) / r ** 2 for r in r_list}
    values = [per_radius[r] for r in r_list]
    if len(r_list) >= 2:
        r2, r1 = r_list[0], r_list[1]
        d2, d1 = per_radius[r2], per_radius[r1]
        richardson = (d2 * r1 ** 2 - d1 * r2 ** 2) / (r1 ** 2 - r2 ** 2)
    else:
        richardson = values[0]
    return {
        "node": complex(node),
        "per_radius": per_radius,
        "richardson": float(richardson),
        "conservative": float(min(values)),
    }


def curvature_certificate(lam: np.ndarray, spacing: float,
                          mask: np.ndarray | None = None,
                          floor: float = 1e-12) -> dict:
    """Pointwise margins Laplacian(log lambda) - 4 lambda^2 on a lattice.

    Nonnegative margins certify curvature <= -4 in the support-function
    sense.  Points under the density floor, outside the mask, or without
    four neighbors are excluded and counted.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 2 or min(lam.shape) < 3:
        raise ValueError("need a 2-d density with at least 3 points per axis")
    under_floor = np.isfinite(lam) & (lam <= floor)
    if mask is not None:
        under_floor &= mask
    valid = np.isfinite(lam) & (lam > floor)
    if mask is not None:
        valid &= mask
    u = np.where(valid, np.log(np.where(valid, lam, 1.0)), np.nan)
    lap = np.full_like(u, np.nan)
    lap[1:-1, 1:-1] = (u[2:, 1:-1] + u[:-2, 1:-1] + u[1:-1, 2:] + u[1:-1, :-2]
                       - 4.0 * u[1:-1, 1:-1]) / spacing ** 2
    margins = lap - 4.0 * lam ** 2
    checked = np.isfinite(margins)
    n_checked = int(np.count_nonzero(checked))
    if n_checked == 0:
        raise ValueError("no lattice point admits a full stencil")
    return {
        "margins": margins,
        "min_margin": float(np.min(margins[checked])),
        "n_checked": n_checked,
        "n_excluded": int(margins.size - n_checked),
        "n_floor_excluded": int(np.count_nonzero(under_floor)),
    }


# ---------------------------------------------------------------------------
# metric comparison


def _chain_round_trip(mu: BeltramiField, nu: complex) -> float:
    sigma = chain_rule(nu, mu)
    back = chain_invert(nu, sigma)
    probe = 0.45 * np.exp(1j * np.linspace(0.0, 2.0 * np.pi, 17)[:-1])
    return float(np.max(np.abs(back.at(probe) - mu.at(probe))))


def metric_comparison(mu: BeltramiField, xs, order: int = 8,
                      grid: DeformationGrid | None = None, seed: int = 0) -> dict:
    """Envelope metrics of a deformation family against its sup-norm ceiling.

    lambda_inf is the envelope over the supplied direction catalogue;
    lambda_kappa enlarges the catalogue with the Takagi direction of the
    infinitesimal Grunsky matrix, the first coordinate direction, and two
    seeded random directions.  The Teichmueller density along the slice is
    only bracketed, never claimed as a value: the per-node lower end is
    lambda_kappa itself, the upper end is the sup norm k scaled by
    1 / (1 - |t|^2), and the scalar lower bound at the base point comes
    from teichmuller_norm_bracket.  A round trip through the affine chain
    rule guards the family's internal consistency.
    """
    grid = grid or DeformationGrid()
    k = mu.sup_norm
    if k == 0.0:
        raise ValueError("zero coefficient generates no deformation")

    trip = _chain_round_trip(mu, 0.15)
    if trip > 1e-8:
        raise MetricChainError(
            f"affine chain round trip off by {trip:.3e}")

    xs = [np.asarray(x, dtype=complex) for x in xs]
    rng = np.random.default_rng(seed)
    extra = [takagi_max_vector(infinitesimal_grunsky_matrix(mu, order))[0]]
    e1 = np.zeros(order, dtype=complex)
    e1[0] = 1.0
    extra.append(e1)
    for _ in range(2):
        v = rng.standard_normal(order) + 1j * rng.standard_normal(order)
        extra.append(v / np.linalg.norm(v))

    cat_coeffs = direction_probes(mu, xs, order)
    sup_coeffs = direction_probes(mu, xs + extra, order)

    def stack_from(coeffs):
        return np.stack([pullback_from_coeffs(c, grid.t) for c in coeffs])

    lam_inf = envelope(stack_from(cat_coeffs))
    lam_kappa = envelope(stack_from(sup_coeffs))
    ceiling = k / (1.0 - np.abs(grid.t) ** 2)
    base_lower, base_upper = teichmuller_norm_bracket(
        mu, order=order, n_restarts=4, n_iters=200, seed=seed)

    inside = grid.mask
    viol_low = float(np.max((lam_inf - lam_kappa)[inside]))
    viol_high = float(np.max((lam_kappa - ceiling)[inside]))
    center = np.unravel_index(int(np.argmin(np.abs(grid.t))), grid.t.shape)
    return {
        "grid": grid,
        "lambda_inf": lam_inf,
        "lambda_kappa": lam_kappa,
        "lambda_teich_lower": lam_kappa,
        "lambda_teich_upper": ceiling,
        "base_bracket": (base_lower, base_upper),
        "ordered": bool(viol_low <= 1e-12 and viol_high <= 1e-12),
        "max_violation_inf_kappa": viol_low,
        "max_violation_kappa_teich": viol_high,
        "center_values": {
            "lambda_inf": float(lam_inf[center]),
            "lambda_kappa": float(lam_kappa[center]),
            "ceiling": float(ceiling[center]),
            "sup_norm": float(k),
        },
        "chain_round_trip": trip,
    }
