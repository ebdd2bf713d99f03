"""Grunsky coefficients of normalized exterior maps.

For a univalent F(z) = z + b_0 + b_1 z^{-1} + ... on {|z| > 1} the
coefficients alpha_mn are defined through

    log (F(z) - F(zeta)) / (z - zeta) = - sum_{m,n >= 1} alpha_mn z^-m zeta^-n.

In the variables u = 1/z, v = 1/zeta the ratio inside the log becomes the
bivariate polynomial 1 - sum b_{m+n-1} u^m v^n, so the alpha_mn follow from
a power-series logarithm in u whose coefficients are truncated series in v.
The scaled matrix B_mn = sqrt(mn) alpha_mn is complex symmetric; its largest
singular value is the degree-N Grunsky norm, attained by the quadratic form
x^T B x at a Takagi vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import TruncatedSeries, mul

__all__ = [
    "GrunskyMatrix",
    "grunsky_matrix",
    "grunsky_norm",
    "grunsky_form",
    "grunsky_norm_bound",
    "takagi_max_vector",
    "convergence_report",
    "tail_coefficients",
]


@dataclass(frozen=True)
class GrunskyMatrix:
    """Scaled Grunsky matrix B_mn = sqrt(mn) alpha_mn, n = 1..N."""

    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        asym = np.max(np.abs(m - m.T)) if m.size else 0.0
        if asym > 1e-10 * max(1.0, np.max(np.abs(m)) if m.size else 0.0):
            raise ValueError(f"matrix is not symmetric (defect {asym:.3e})")

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    def principal(self, n: int) -> "GrunskyMatrix":
        if not 1 <= n <= self.order:
            raise ValueError(f"principal block size {n} out of range")
        return GrunskyMatrix(self.matrix[:n, :n])


def tail_coefficients(laurent) -> np.ndarray:
    """Tail [b_1, b_2, ...] of a normalized exterior map.

    Accepts either a TruncatedSeries over windows like [-M, 1] with unit
    coefficient on z^1, or a plain vector already listing b_1, b_2, ...
    """
    if isinstance(laurent, TruncatedSeries):
        if laurent.hi < 1 or laurent.lo > -1:
            raise ValueError("series must cover powers z^1 down to z^-1")
        lead = laurent.coeff(1)
        if abs(lead - 1.0) > 1e-6:
            raise ValueError(f"map is not normalized: leading coefficient {lead}")
        return np.array([laurent.coeff(-k) for k in range(1, -laurent.lo + 1)],
                        dtype=complex)
    b = np.asarray(laurent, dtype=complex)
    if b.ndim != 1:
        raise ValueError("tail coefficients must form a vector")
    return b


def grunsky_matrix(laurent, order: int | None = None) -> GrunskyMatrix:
    """Degree-`order` Grunsky matrix from Laurent data of the map.

    Requires tail coefficients through b_{2*order-1}; missing coefficients
    are an error rather than implicit zeros (pad explicitly when the tail
    is known to terminate).
    """
    b = tail_coefficients(laurent)
    if order is None:
        order = (b.size + 1) // 2
    if order < 1:
        raise ValueError("order must be positive")
    if b.size < 2 * order - 1:
        raise ValueError(
            f"need tail through b_{2 * order - 1} for an order-{order} matrix, "
            f"got {b.size} coefficients")

    # Rows of the bivariate ratio: 1 + sum_m u^m h_m(v), h_m(v) = -sum_n b_{m+n-1} v^n.
    def row(m):
        coeffs = np.zeros(order + 1, dtype=complex)
        coeffs[1:] = -b[m - 1:m + order - 1]
        return TruncatedSeries(0, order, coeffs)

    h = [row(m) for m in range(1, order + 1)]
    ell: list[TruncatedSeries] = []
    for m in range(1, order + 1):
        acc = h[m - 1]
        for j in range(1, m):
            acc = acc + mul(ell[j - 1], h[m - j - 1], lo=0, hi=order).scale(-j / m)
        ell.append(acc)

    alpha = np.empty((order, order), dtype=complex)
    for m in range(1, order + 1):
        for n in range(1, order + 1):
            alpha[m - 1, n - 1] = -ell[m - 1].coeff(n)
    idx = np.arange(1, order + 1, dtype=float)
    return GrunskyMatrix(np.sqrt(np.outer(idx, idx)) * alpha)


def _as_matrix(b) -> np.ndarray:
    return b.matrix if isinstance(b, GrunskyMatrix) else np.asarray(b, dtype=complex)


def grunsky_norm(b) -> float:
    """Largest singular value of the scaled Grunsky matrix."""
    m = _as_matrix(b)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def grunsky_form(b, x: np.ndarray) -> complex:
    """Quadratic form x^T B x over a unit coefficient vector."""
    m = _as_matrix(b)
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.size > m.shape[0]:
        raise ValueError(f"x must be a vector of length <= {m.shape[0]}")
    nrm = np.linalg.norm(x)
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError(f"x must be a unit vector, got norm {nrm}")
    block = m[:x.size, :x.size]
    return complex(x @ block @ x)


def grunsky_norm_bound(k: float, alpha: float) -> float:
    """Upper bound (k^2 + alpha) / (1 + alpha) for the Grunsky norm of a map
    with dilatation bound k whose normalized boundary pairing reaches alpha.

    Monotone increasing in alpha on [0, k], with value k^2 at alpha = 0 and
    k exactly at alpha = k, so the bound is strictly below k whenever the
    pairing stays away from its extremal value.
    """
    if not 0.0 <= k < 1.0:
        raise ValueError(f"k must lie in [0, 1), got {k}")
    if alpha < -1e-12 or alpha > k + 1e-12:
        raise ValueError(f"alpha must lie in [0, k], got alpha={alpha}, k={k}")
    alpha = min(max(alpha, 0.0), k)
    return (k * k + alpha) / (1.0 + alpha)


def takagi_max_vector(b) -> tuple[np.ndarray, float]:
    """Unit vector x with |x^T B x| equal to the largest singular value.

    Uses the singular pair (u, v) of a complex symmetric matrix: the
    antilinear map x -> conj(B x) fixes v + e^{i psi} conj(u) up to a phase,
    so any nonzero combination attains the norm; the phase is chosen to keep
    the combination well away from zero.
    """
    m = _as_matrix(b)
    u, s, vh = np.linalg.svd(m)
    u1 = u[:, 0]
    v1 = vh[0].conj()
    g = complex(v1.conj() @ u1.conj())
    phase = g.conjugate() / abs(g) if abs(g) > 1e-12 else 1.0
    x = v1 + phase * u1.conj()
    x = x / np.linalg.norm(x)
    return x, float(s[0])


def convergence_report(laurent, orders) -> dict:
    """Grunsky norms along principal submatrices with extrapolation.

    Returns per-order norms kappa_N, successive increments, a Aitken
    delta-squared extrapolation from the last three values, a combined
    uncertainty (distance of the extrapolant to the last value plus the
    last increment), and a monotonicity flag.
    """
    orders = sorted(int(n) for n in orders)
    if not orders or orders[0] < 1:
        raise ValueError("orders must be positive integers")
    top = grunsky_matrix(laurent, orders[-1])
    kappas = [grunsky_norm(top.principal(n)) for n in orders]
    deltas = [float("nan")] + [kappas[i] - kappas[i - 1] for i in range(1, len(kappas))]

    extrapolated = kappas[-1]
    if len(kappas) >= 3:
        k0, k1, k2 = kappas[-3:]
        denom = (k2 - k1) - (k1 - k0)
        if abs(denom) > 1e-14:
            extrapolated = k2 - (k2 - k1) ** 2 / denom
    last_step = abs(kappas[-1] - kappas[-2]) if len(kappas) >= 2 else 0.0
    uncertainty = abs(extrapolated - kappas[-1]) + last_step
    monotone = all(d >= -1e-12 for d in deltas[1:])
    return {
        "orders": orders,
        "kappa": kappas,
        "delta": deltas,
        "extrapolated": float(extrapolated),
        "uncertainty": float(uncertainty),
        "monotone": bool(monotone),
    }
