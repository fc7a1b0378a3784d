"""Physical diagnostics of a coherent state.

Energy expectations (closed hypergeometric form and direct sum), rung-number
statistics with the Mandel Q parameter, position/momentum moment matrices
with uncertainty products, and Wigner phase-space functions.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coherent import (
    CoherentSpec,
    coefficients,
    evolve,
    hypergeometric_parameters,
    series_argument,
)
from .specfun import (
    NumericalError,
    SignedLog,
    integrate,
    log_pochhammer,
    panel_nodes,
    signed_series,
)
from .system import EigenfunctionEvaluator, StateLabel, wavefunction_rows

__all__ = [
    "MomentMatrices",
    "WignerGrid",
    "UncertaintyResult",
    "energy_expectation",
    "number_moments",
    "mandel_q",
    "moment_matrices",
    "uncertainty",
    "wigner_cross_term",
    "wigner_grid",
]

MAX_MOMENT_TRUNCATION = 60


# ---------------------------------------------------------------------------
# energies and number statistics
# ---------------------------------------------------------------------------

def _factorial_moment(m: int, mu: int, abs_z: float, order: int,
                      relative_tol: float = 1e-12) -> float:
    """Falling-factorial moment <k (k-1) ... (k-order+1)> of the rung number
    for the nonlinear weights, via the shifted-parameter series ratio

        order! x^order / prod_j (b_j)_order * F(order+1; b+order; x) / F(1; b; x).
    """
    if abs_z == 0.0:
        return 0.0
    b = hypergeometric_parameters(m, mu)
    x = series_argument(m, abs_z)
    num = signed_series((order + 1.0,), tuple(bj + order for bj in b), x, relative_tol).value
    den = signed_series((1.0,), b, x, relative_tol).value
    pref = SignedLog(1, order * math.log(x) + math.log(math.factorial(order)))
    for bj in b:
        pref = pref / log_pochhammer(bj, order)
    return (pref * (num / den)).to_float()


def energy_expectation(spec: CoherentSpec, method: str = "closed_form",
                       tail_tol: float = 1e-14, relative_tol: float = 1e-12) -> float:
    """<H> in the coherent state.

    closed_form evaluates the hypergeometric ratio (nonlinear) or the
    quadratic law 2 mu + 2m + 2 + (m+1)|z|^2 (linearized); direct sums the
    eigenvalues against the truncated weights.  The two agree to the
    truncation and series tolerances.
    """
    base = 2.0 * spec.mu + 2.0 * spec.m + 2.0
    if method == "direct":
        c = coefficients(spec, tail_tol)
        k = np.arange(len(c.entries), dtype=float)
        w = np.abs(c.entries) ** 2
        return float(np.sum((base + (2.0 * spec.m + 2.0) * k) * w))
    if method != "closed_form":
        raise ValueError("method must be 'closed_form' or 'direct'")
    if spec.variant == "linearized":
        return base + (spec.m + 1.0) * spec.abs_z ** 2
    mean_k = _factorial_moment(spec.m, spec.mu, spec.abs_z, 1, relative_tol)
    return base + (2.0 * spec.m + 2.0) * mean_k


def number_moments(spec: CoherentSpec, method: str = "closed_form",
                   tail_tol: float = 1e-14, relative_tol: float = 1e-12):
    """(<N>, <N(N-1)>) for the rung-number operator N |mu + (m+1)k> = k |...>."""
    if method == "direct":
        c = coefficients(spec, tail_tol)
        k = np.arange(len(c.entries), dtype=float)
        w = np.abs(c.entries) ** 2
        return float(np.sum(k * w)), float(np.sum(k * (k - 1.0) * w))
    if method != "closed_form":
        raise ValueError("method must be 'closed_form' or 'direct'")
    if spec.variant == "linearized":
        n = 0.5 * spec.abs_z ** 2
        return n, n * n
    return (_factorial_moment(spec.m, spec.mu, spec.abs_z, 1, relative_tol),
            _factorial_moment(spec.m, spec.mu, spec.abs_z, 2, relative_tol))


def mandel_q(spec: CoherentSpec, method: str = "closed_form",
             tail_tol: float = 1e-14, relative_tol: float = 1e-12) -> float:
    """Mandel parameter (<N(N-1)> - <N>^2) / <N>.

    Zero marks Poisson statistics, negative sub-Poissonian.  The value at
    z = 0 is defined as the limit 0; the linearized variant is identically
    Poissonian, so its closed form returns exactly 0.
    """
    if spec.abs_z == 0.0:
        return 0.0
    if method == "closed_form" and spec.variant == "linearized":
        return 0.0
    n1, n2 = number_moments(spec, method, tail_tol, relative_tol)
    return (n2 - n1 * n1) / n1


# ---------------------------------------------------------------------------
# moment matrices and uncertainty products
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MomentMatrices:
    """Matrix elements of x, x^2, p, p^2 between the basis states of one
    ladder, indexed by rung number 0..K.

    mx, mx2, mp2 are real symmetric; mp is Hermitian with purely imaginary
    entries (-i times a real antisymmetric matrix) and zero diagonal, since
    the eigenfunctions are real.
    """

    m: int
    mu: int
    K: int
    mx: np.ndarray
    mx2: np.ndarray
    mp: np.ndarray
    mp2: np.ndarray


def moment_matrices(m: int, mu: int, K: int, abs_tol: float = 1e-10,
                    max_refinements: int = 3) -> MomentMatrices:
    """Quadrature of the four moment integrands over a shared node set.

    Composite Gauss-Legendre panels sized to the fastest basis oscillation,
    refined by bisection until every entry is stable to abs_tol.  The second
    derivative entering p^2 is analytic, not finite-difference.
    """
    if K > MAX_MOMENT_TRUNCATION:
        raise ValueError(f"moment matrices support K <= {MAX_MOMENT_TRUNCATION}")
    if max_refinements < 1:
        raise ValueError("need at least one refinement pass")
    nu_max = mu + (m + 1) * K
    e_max = 2.0 * max(nu_max + m + 1, 1)
    k_osc = math.sqrt(2.0 * e_max)
    half = k_osc + 4.0
    panels = max(8, int(math.ceil(2.0 * half * k_osc / 8.0)))

    def build(n_panels: int):
        xs, ws = panel_nodes(-half, half, n_panels, degree=20)
        p0 = wavefunction_rows(m, mu, range(K + 1), xs, 0)
        p1 = wavefunction_rows(m, mu, range(K + 1), xs, 1)
        p2 = wavefunction_rows(m, mu, range(K + 1), xs, 2)
        w0 = p0 * ws
        mx = (w0 * xs) @ p0.T
        mx2 = (w0 * xs * xs) @ p0.T
        mp = -1j * (w0 @ p1.T)
        mp2 = -(w0 @ p2.T)
        return mx, mx2, mp, mp2

    coarse = build(panels)
    for _ in range(max_refinements):
        panels *= 2
        fine = build(panels)
        diff = max(float(np.max(np.abs(f - c))) for f, c in zip(fine, coarse))
        if diff <= abs_tol:
            return MomentMatrices(m, mu, K, *fine)
        coarse = fine
    raise NumericalError("moment-matrix quadrature did not stabilise", best_error=diff)


@lru_cache(maxsize=64)
def _cached_matrices(m: int, mu: int, K: int, abs_tol: float) -> MomentMatrices:
    return moment_matrices(m, mu, K, abs_tol)


UncertaintyResult = namedtuple("UncertaintyResult", ["sigma_x", "sigma_p", "product"])


def uncertainty(spec: CoherentSpec, t: float = 0.0, tail_tol: float = 1e-14,
                quad_tol: float = 1e-10) -> UncertaintyResult:
    """Standard deviations of position and momentum and their product for
    the time-evolved state; the product is bounded below by 1/2."""
    c = coefficients(evolve(spec, t), tail_tol)
    if c.K > MAX_MOMENT_TRUNCATION:
        raise ValueError(f"coefficient truncation {c.K} exceeds the "
                         f"K <= {MAX_MOMENT_TRUNCATION} moment-matrix range")
    # round the truncation up to a multiple of 8 so z-grid scans share
    # cached matrices; the extra rows multiply zero-padded coefficients
    K = min((c.K + 7) // 8 * 8, MAX_MOMENT_TRUNCATION)
    mats = _cached_matrices(spec.m, spec.mu, K, quad_tol)
    a = np.zeros(K + 1, dtype=complex)
    a[: len(c.entries)] = c.entries

    def form(matrix) -> float:
        return float(np.real(np.conj(a) @ matrix @ a))

    x1, x2 = form(mats.mx), form(mats.mx2)
    p1, p2 = form(mats.mp), form(mats.mp2)
    sigma_x = math.sqrt(max(x2 - x1 * x1, 0.0))
    sigma_p = math.sqrt(max(p2 - p1 * p1, 0.0))
    return UncertaintyResult(sigma_x, sigma_p, sigma_x * sigma_p)


# ---------------------------------------------------------------------------
# Wigner functions
# ---------------------------------------------------------------------------

def wigner_cross_term(label_a: StateLabel, label_b: StateLabel,
                      x: float, p: float, tol: float = 1e-10) -> complex:
    """Phase-space kernel (1/pi) int dy psi_a(x-y) psi_b(x+y) exp(-2ipy)
    between two basis states of the same ladder, by adaptive quadrature."""
    if (label_a.m, label_a.mu) != (label_b.m, label_b.mu):
        raise ValueError("labels must belong to the same ladder")
    ev_a = EigenfunctionEvaluator(label_a)
    ev_b = EigenfunctionEvaluator(label_b)
    e_hi = 2.0 * max(max(label_a.nu, label_b.nu) + label_a.m + 1, 1)
    half = math.sqrt(2.0 * e_hi) + 5.0

    real = integrate(lambda y: ev_a(x - y) * ev_b(x + y) * math.cos(2.0 * p * y),
                     -half, half, tol).value
    imag = integrate(lambda y: -ev_a(x - y) * ev_b(x + y) * math.sin(2.0 * p * y),
                     -half, half, tol).value
    return complex(real, imag) / math.pi


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """Wigner function sampled on a rectangular phase-space grid."""

    x: np.ndarray
    p: np.ndarray
    values: np.ndarray        # shape (len(x), len(p))
    min_value: float
    negative_volume: float    # integral of |min(W, 0)|
    mass: float               # grid sum times cell area
    truncation: int           # rung count of the underlying state

    def marginal_x(self) -> np.ndarray:
        """Momentum-integrated marginal, which equals the position density."""
        return np.trapezoid(self.values, self.p, axis=1)


def wigner_grid(spec: CoherentSpec, window=((-8.0, 8.0), (-8.0, 8.0)),
                resolution=(161, 161), tail_tol: float = 1e-14,
                imag_tol: float = 1e-6, chunk: int = 400_000) -> WignerGrid:
    """Wigner function of the coherent state on a grid.

    The double sum over basis-state kernels is evaluated in factorised form:
    the truncated state amplitude at x-y and x+y, integrated over y on a
    shared composite Gauss-Legendre grid with the oscillating factor
    exp(-2ipy) applied as a single matrix product.  At |z| <= 10 the
    coefficient truncation is extended to at least ten rungs.

    Raises NumericalError if the imaginary residue exceeds imag_tol of the
    largest real value.
    """
    min_index = 10 if spec.abs_z <= 10.0 else 0
    c = coefficients(spec, tail_tol, min_index=min_index)
    (x_lo, x_hi), (p_lo, p_hi) = window
    nx, np_count = resolution
    if nx < 2 or np_count < 2:
        raise ValueError("the grid needs at least two points per axis")
    x = np.linspace(x_lo, x_hi, nx)
    p = np.linspace(p_lo, p_hi, np_count)

    nu_max = spec.mu + (spec.m + 1) * c.K
    e_max = 2.0 * max(nu_max + spec.m + 1, 1)
    k_osc = math.sqrt(2.0 * e_max)
    half_y = k_osc + 6.0  # the product psi(x-y) psi(x+y) needs |y| <= support - |x|
    rate = k_osc + 2.0 * max(abs(p_lo), abs(p_hi))
    panels = max(8, int(math.ceil(2.0 * half_y * rate / 10.0)))
    ys, ws = panel_nodes(-half_y, half_y, panels, degree=24)

    kernel = np.exp(-2j * np.outer(ys, p))
    values_c = np.empty((nx, np_count), dtype=complex)
    rows_per_chunk = max(1, chunk // ys.size)
    ks = range(len(c.entries))
    for start in range(0, nx, rows_per_chunk):
        xs = x[start:start + rows_per_chunk]
        minus = (xs[:, None] - ys[None, :]).ravel()
        plus = (xs[:, None] + ys[None, :]).ravel()
        amp_minus = c.entries @ wavefunction_rows(spec.m, spec.mu, ks, minus)
        amp_plus = c.entries @ wavefunction_rows(spec.m, spec.mu, ks, plus)
        core = (np.conj(amp_minus) * amp_plus).reshape(xs.size, ys.size) * ws
        values_c[start:start + rows_per_chunk] = core @ kernel / math.pi

    scale = float(np.max(np.abs(values_c.real)))
    residue = float(np.max(np.abs(values_c.imag)))
    if residue > imag_tol * scale:
        raise NumericalError(
            f"imaginary residue {residue:.3e} exceeds {imag_tol:.1e} of peak {scale:.3e}")
    values = values_c.real
    cell = (x[1] - x[0]) * (p[1] - p[0])
    negative = float(np.sum(np.abs(np.minimum(values, 0.0))) * cell)
    return WignerGrid(x, p, values, float(values.min()), negative,
                      float(values.sum() * cell), c.K)
