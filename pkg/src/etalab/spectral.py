"""One-dimensional model operators on the circle, its n-fold covers and the line.

The operator acts on sections of a flat line bundle with holonomy
``exp(2 pi i theta)`` over the unit circle:

* one component:  D = -i d/dx + c
* two components: D = sigma_3 (-i d/dx) + (m + v(x)) sigma_1 + c

with v a real trigonometric polynomial of period 1. Everything reduces to
the unit-cell operator D(kappa) acting on functions with
f(x + 1) = exp(2 pi i kappa) f(x), diagonalized in the Fourier basis
exp(2 pi i (k + kappa) x), |k| <= K. The n-fold cover is the direct sum of
the cells with kappa = theta + r/n, the line is the direct integral over
kappa in [0, 1).

Kernel convention: K(x, y) = sum_b f(lambda_b) u_b(x) u_b(y)^*, so for v = 0
the kernel depends on x - y through exp(+i xi (x - y)). A deck translation by
an integer beta acts on the lifted bundle with the phase exp(2 pi i theta beta);
the folding identity below is the check that these conventions agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

TWO_PI = 2.0 * math.pi


class GapError(ValueError):
    """An analytic precondition (spectral gap at zero) does not hold."""


@dataclass(frozen=True)
class ModelOperator:
    components: int = 2
    mass: float = 0.0
    shift: float = 0.0
    theta: float = 0.0
    cos_terms: tuple[tuple[int, float], ...] = ()
    sin_terms: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if self.components not in (1, 2):
            raise ValueError("components must be 1 or 2")
        if self.mass < 0:
            raise ValueError("mass must be nonnegative")
        if not 0.0 <= self.theta < 1.0:
            raise ValueError("theta must lie in [0, 1)")
        if self.components == 1 and (self.mass or self.cos_terms or self.sin_terms):
            raise ValueError("mass and potential apply to the two-component family only")
        for j, _ in self.cos_terms + self.sin_terms:
            if j < 0:
                raise ValueError("potential frequencies must be nonnegative")

    @property
    def has_potential(self) -> bool:
        return any(a for _, a in self.cos_terms + self.sin_terms)

    @property
    def bandwidth(self) -> int:
        return max((j for j, a in self.cos_terms + self.sin_terms if a), default=0)

    @property
    def potential_sup_bound(self) -> float:
        """Upper bound for sup|v| (exact for a single harmonic)."""
        return float(sum(abs(a) for _, a in self.cos_terms + self.sin_terms))

    @property
    def gap_certificate(self) -> float:
        """m - |c| - sup|v|; positive means the line operator has a gap at least this large."""
        if self.components == 1:
            return 0.0
        return self.mass - abs(self.shift) - self.potential_sup_bound

    @property
    def operator_scale(self) -> float:
        return self.mass + abs(self.shift) + self.potential_sup_bound

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        v = np.zeros_like(x)
        for j, a in self.cos_terms:
            v = v + a * np.cos(TWO_PI * j * x)
        for j, b in self.sin_terms:
            v = v + b * np.sin(TWO_PI * j * x)
        return v

    def potential_fourier(self) -> dict[int, complex]:
        """Coefficients hat v_q of v(x) = sum_q hat v_q exp(2 pi i q x)."""
        out: dict[int, complex] = {}
        for j, a in self.cos_terms:
            if j == 0:
                out[0] = out.get(0, 0) + a
                continue
            out[j] = out.get(j, 0) + a / 2
            out[-j] = out.get(-j, 0) + a / 2
        for j, b in self.sin_terms:
            if j == 0:
                continue
            out[j] = out.get(j, 0) + b / 2j
            out[-j] = out.get(-j, 0) - b / 2j
        return out

    def with_shift(self, c: float) -> ModelOperator:
        return ModelOperator(self.components, self.mass, c, self.theta, self.cos_terms, self.sin_terms)

    def with_theta(self, theta: float) -> ModelOperator:
        return ModelOperator(self.components, self.mass, self.shift, theta % 1.0, self.cos_terms, self.sin_terms)


@dataclass(frozen=True)
class CoverSpec:
    """Finite(n) when n is an integer, the line when n is None."""

    n: int | None = None

    @classmethod
    def line(cls) -> CoverSpec:
        return cls(None)

    @classmethod
    def finite(cls, n: int) -> CoverSpec:
        if n < 1:
            raise ValueError("cover degree must be positive")
        return cls(n)

    @property
    def is_line(self) -> bool:
        return self.n is None

    @property
    def kind(self) -> Literal["line", "finite"]:
        return "line" if self.n is None else "finite"

    # the deck action x -> x + 1 is an isometry of the line: dist(x, x + a) = |a| = l(a)
    theta0 = theta1 = 1.0
    c0 = c1 = 0.0

    def __str__(self) -> str:
        return "line" if self.n is None else f"n={self.n}"


# --- unit cell ----------------------------------------------------------------


@dataclass(frozen=True)
class CellSpectrum:
    kappa: float
    K: int
    eigenvalues: np.ndarray
    vectors: np.ndarray  # (2K+1, components, n_eig), coefficients of exp(2 pi i (k + kappa) x)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def u(self, x: float) -> np.ndarray:
        """Eigenfunctions at x, shape (components, n_eig)."""
        phase = np.exp(1j * TWO_PI * (self.modes + self.kappa) * x)
        return np.einsum("k,kcb->cb", phase, self.vectors)

    def u_many(self, xs: np.ndarray) -> np.ndarray:
        """Eigenfunctions at several points, shape (len(xs), components, n_eig)."""
        phase = np.exp(1j * TWO_PI * np.outer(xs, self.modes + self.kappa))
        return np.einsum("yk,kcb->ycb", phase, self.vectors)


def cell_hamiltonian(op: ModelOperator, kappa: float, K: int) -> np.ndarray:
    k = np.arange(-K, K + 1)
    xi = TWO_PI * (k + kappa)
    nk = len(k)
    if op.components == 1:
        return np.diag(xi + op.shift).astype(complex)
    H = np.zeros((nk, 2, nk, 2), dtype=complex)
    idx = np.arange(nk)
    H[idx, 0, idx, 0] = xi + op.shift
    H[idx, 1, idx, 1] = -xi + op.shift
    H[idx, 0, idx, 1] = op.mass
    H[idx, 1, idx, 0] = op.mass
    for q, vq in op.potential_fourier().items():
        # <k|v|k'> = hat v_{k - k'}
        rows = idx[(idx - q >= 0) & (idx - q < nk)]
        cols = rows - q
        H[rows, 0, cols, 1] += vq
        H[rows, 1, cols, 0] += vq
    return H.reshape(2 * nk, 2 * nk)


@lru_cache(maxsize=256)
def cell_spectrum(op: ModelOperator, kappa: float, K: int) -> CellSpectrum:
    nk = 2 * K + 1
    if op.components == 1:
        k = np.arange(-K, K + 1)
        ev = TWO_PI * (k + kappa) + op.shift
        vec = np.eye(nk, dtype=complex).reshape(nk, 1, nk)
        return CellSpectrum(kappa, K, ev, vec)
    if not op.has_potential:
        # 2x2 blocks [[xi + c, m], [m, -xi + c]]: eigenvalues c +- sqrt(xi^2 + m^2)
        k = np.arange(-K, K + 1)
        xi = TWO_PI * (k + kappa)
        E = np.hypot(xi, op.mass)
        ev = np.concatenate([op.shift + E, op.shift - E])
        vec = np.zeros((nk, 2, 2 * nk), dtype=complex)
        for sign, off in ((1.0, 0), (-1.0, nk)):
            lam = sign * E
            if op.mass > 0:
                # (xi - lam) a + m b = 0
                a, b = np.full(nk, op.mass), lam - xi
            else:
                up = xi >= 0 if sign > 0 else xi < 0
                a, b = up.astype(float), (~up).astype(float)
            norm = np.hypot(a, b)
            vec[np.arange(nk), 0, off + np.arange(nk)] = a / norm
            vec[np.arange(nk), 1, off + np.arange(nk)] = b / norm
        return CellSpectrum(kappa, K, ev, vec)
    H = cell_hamiltonian(op, kappa, K)
    ev, V = np.linalg.eigh(H)
    return CellSpectrum(kappa, K, ev, V.reshape(nk, 2, 2 * nk))


@lru_cache(maxsize=8192)
def cell_eigenvalues(op: ModelOperator, kappa: float, K: int) -> np.ndarray:
    """Eigenvalues only (cheaper, and small enough to cache for whole towers)."""
    if op.components == 1 or not op.has_potential:
        return cell_spectrum.__wrapped__(op, kappa, K).eigenvalues
    return np.linalg.eigvalsh(cell_hamiltonian(op, kappa, K))


def modes_for(op: ModelOperator, t: float, eps_exponent: float = 42.0) -> int:
    """Fourier cutoff K so that every omitted eigenvalue has t^2 lambda^2 >= eps_exponent."""
    lam = math.sqrt(eps_exponent) / t + op.operator_scale
    return int(math.ceil(lam / TWO_PI)) + 2 * op.bandwidth + 2


def omitted_mode_lower_bound(op: ModelOperator, K: int) -> float:
    """Lower bound on |lambda| for eigenvalues not represented with K modes."""
    return TWO_PI * (K - op.bandwidth) - op.operator_scale


# --- covers -------------------------------------------------------------------


def cover_kappas(op: ModelOperator, n: int) -> np.ndarray:
    # lifted holonomy: the n-cover twists by n*theta, frequencies 2 pi (j/n + theta)
    return np.array([(op.theta + r / n) % 1.0 for r in range(n)])


def cover_phases(n: int, a: int) -> np.ndarray:
    """Weights exp(-2 pi i r a / n) of the cells in the class-a delocalized trace."""
    r = np.arange(n)
    return np.exp(-1j * TWO_PI * r * (a % n) / n)


@dataclass
class SpectralData:
    n: int
    K_max: int
    eigenvalues: np.ndarray
    block: np.ndarray  # cell index r of each eigenvalue
    truncation_bound: float
    flagged: bool = False

    def deloc_weight(self, a: int) -> np.ndarray:
        """w_a(lambda) for every eigenvalue (plane-wave cells give exp(-2 pi i r a/n)/n)."""
        return cover_phases(self.n, a)[self.block] / self.n

    @property
    def gap(self) -> float:
        return float(np.min(np.abs(self.eigenvalues)))


def spectrum_on_cover(op: ModelOperator, n: int, K_max: int, window: float = 50.0, tol: float = 1e-8) -> SpectralData:
    """Spectrum of the lift to the n-fold cover, K_max Fourier modes per cell.

    With a potential the truncation bound is the largest eigenvalue change
    inside |lambda| <= window between K_max and 2 K_max modes.
    """
    if op.has_potential and K_max < 16:
        raise ValueError("K_max >= 16 required with a potential")
    evs, blocks = [], []
    bound = 0.0
    for r, kappa in enumerate(cover_kappas(op, n)):
        ev = cell_eigenvalues(op, float(kappa), K_max)
        evs.append(ev)
        blocks.append(np.full(len(ev), r))
        if op.has_potential:
            ev2 = cell_eigenvalues(op, float(kappa), 2 * K_max)
            lo = np.sort(ev[np.abs(ev) <= window])
            hi = np.sort(ev2[np.abs(ev2) <= window])
            if len(lo) != len(hi):
                bound = math.inf
            elif len(lo):
                bound = max(bound, float(np.max(np.abs(lo - hi))))
    ev = np.concatenate(evs)
    blk = np.concatenate(blocks)
    order = np.argsort(ev, kind="stable")
    return SpectralData(n, K_max, ev[order], blk[order], bound, flagged=bound > tol)


def closed_form_eigenvalues(op: ModelOperator, n: int, K_max: int) -> np.ndarray:
    """Potential-free spectrum on the n-cover from the dispersion relation."""
    if op.has_potential:
        raise ValueError("closed form only without potential")
    k = np.arange(-K_max, K_max + 1)
    xi = np.concatenate([TWO_PI * (k + kappa) for kappa in cover_kappas(op, n)])
    if op.components == 1:
        return np.sort(xi + op.shift)
    E = np.hypot(xi, op.mass)
    return np.sort(np.concatenate([op.shift + E, op.shift - E]))


def line_gap(op: ModelOperator, theta_grid: int = 64, K: int = 32) -> float:
    """min over Bloch parameters kappa = j/grid of min |eigenvalue| of the cell operator."""
    if op.components == 1:
        raise GapError("line cover gapless for this family")
    K = max(K, 16 + 2 * op.bandwidth) if op.has_potential else K
    return float(min(np.min(np.abs(cell_eigenvalues(op, j / theta_grid, K))) for j in range(theta_grid)))


# --- kernels ------------------------------------------------------------------


def f_heat(lam, t):
    """lambda exp(-t^2 lambda^2)"""
    return lam * np.exp(-(t * t) * lam * lam)


def cell_kernel(op: ModelOperator, kappa: float, t: float, x: float, y: float, K: int) -> np.ndarray:
    s = cell_spectrum(op, float(kappa), K)
    ux, uy = s.u(x), s.u(y)
    return (ux * f_heat(s.eigenvalues, t)) @ uy.conj().T


@dataclass
class KernelSample:
    t: float
    x: float
    y: float
    value: np.ndarray
    error_bound: float
    flagged: bool = False

    @property
    def spinor_trace(self) -> complex:
        return complex(np.trace(self.value))


def gauss_legendre_01(N: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(N)
    return (x + 1) / 2, w / 2


def deck_phase(op: ModelOperator, beta: int | np.ndarray):
    return np.exp(1j * TWO_PI * op.theta * np.asarray(beta))


def _omitted_kernel_bound(op: ModelOperator, t: float, K: int) -> float:
    # sum over omitted eigenvalues |lambda| e^{-t^2 lambda^2}, at most 2 per mode and component
    lam0 = omitted_mode_lower_bound(op, K)
    total, j = 0.0, 0
    while True:
        lam = lam0 + TWO_PI * j
        term = 2 * op.components * float(f_heat(lam, t))
        total += term
        if lam > 1.0 / (t * math.sqrt(2)) and term < 1e-18 * max(total, 1e-300):
            break
        j += 1
    return total


def finite_kernel(op: ModelOperator, n: int, t: float, x: float, y: float, K: int | None = None) -> KernelSample:
    """Kernel of D e^{-t^2 D^2} on the n-fold cover (x, y real, read mod n)."""
    if t <= 0:
        raise ValueError("t must be positive")
    K = K or modes_for(op, t)
    val = sum(cell_kernel(op, kappa, t, x, y, K) for kappa in cover_kappas(op, n)) / n
    bound = _omitted_kernel_bound(op, t, K)
    return KernelSample(t, x, y, np.asarray(val), bound, flagged=bound > 1e-8)


LINE_KERNEL_TOL = 1e-12


def _bloch_rule_many(op: ModelOperator, t: float, x: float, ys: np.ndarray, N: int, K: int) -> np.ndarray:
    """N-node Gauss-Legendre Bloch integral of the cell kernels, for every y at once."""
    kap, w = gauss_legendre_01(N)
    out = np.zeros((len(ys), op.components, op.components), dtype=complex)
    for ki, wi in zip(kap, w):
        s = cell_spectrum(op, float(ki), K)
        ux = s.u(x) * f_heat(s.eigenvalues, t)
        out += wi * np.einsum("cb,ydb->ycd", ux, s.u_many(ys).conj())
    return out


def line_kernels(
    op: ModelOperator, t: float, x: float, ys, nodes: int = 64, K: int | None = None, certify: bool = True
) -> list[KernelSample]:
    """Line kernels K_t(x, y) for several y, via Bloch quadrature over kappa.

    With ``certify`` the node count is doubled until two successive rules
    agree to LINE_KERNEL_TOL at every y (at most 4 doublings); the last
    difference at each y is its quadrature error.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    K = K or modes_for(op, t)
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    N = max(nodes, int(8 * float(np.max(np.abs(x - ys)))) + 16)
    val = _bloch_rule_many(op, t, x, ys, N, K)
    err = np.zeros(len(ys))
    if certify:
        for _ in range(4):
            val2 = _bloch_rule_many(op, t, x, ys, 2 * N, K)
            err = np.max(np.abs(val2 - val), axis=(1, 2))
            val, N = val2, 2 * N
            if np.max(err) < LINE_KERNEL_TOL:
                break
    omitted = _omitted_kernel_bound(op, t, K)
    return [KernelSample(t, x, float(y), v, float(e) + omitted, flagged=float(e) + omitted > 1e-8) for y, v, e in zip(ys, val, err)]


def line_kernel(
    op: ModelOperator, t: float, x: float, y: float, nodes: int = 64, K: int | None = None, certify: bool = True
) -> KernelSample:
    """Kernel on the line via Bloch quadrature over kappa (Gauss-Legendre on [0, 1))."""
    return line_kernels(op, t, x, [y], nodes, K, certify)[0]


def line_kernel_fourier(op: ModelOperator, t: float, d: float, points: int = 4001) -> np.ndarray:
    """Potential-free line kernel at separation d = x - y by direct Fourier integration.

    K(d) = (1/2pi) int exp(i xi d) f_t(symbol(xi)) dxi, integrated with
    Gauss-Legendre panels on |xi| <= L where the Gaussian factor is below 1e-18.
    Independent of the Bloch machinery; used as an oracle.
    """
    if op.has_potential:
        raise ValueError("direct Fourier kernel needs v = 0")
    L = (math.sqrt(42.0) / t + op.operator_scale) * 1.2
    panels = max(64, int(L * (1 + abs(d)) / 2))
    xg, wg = np.polynomial.legendre.leggauss(24)
    edges = np.linspace(-L, L, panels + 1)
    h = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    xi = (mid[:, None] + h[:, None] * xg[None, :]).ravel()
    w = (h[:, None] * wg[None, :]).ravel()
    phase = np.exp(1j * xi * d) * w / TWO_PI
    if op.components == 1:
        return np.array([[np.sum(phase * f_heat(xi + op.shift, t))]])
    E = np.hypot(xi, op.mass)
    fp, fm = f_heat(op.shift + E, t), f_heat(op.shift - E, t)
    # projectors onto the +-E eigenvectors of xi sigma_3 + m sigma_1
    s3 = xi / np.where(E > 0, E, 1.0)
    s1 = op.mass / np.where(E > 0, E, 1.0)
    even = (fp + fm) / 2
    odd = (fp - fm) / 2
    out = np.empty((2, 2), dtype=complex)
    out[0, 0] = np.sum(phase * (even + odd * s3))
    out[1, 1] = np.sum(phase * (even - odd * s3))
    out[0, 1] = out[1, 0] = np.sum(phase * odd * s1)
    return out


def heat_kernel(op: ModelOperator, cover: CoverSpec, t: float, x: float, y: float, **kw) -> KernelSample:
    if cover.is_line:
        return line_kernel(op, t, x, y, **kw)
    return finite_kernel(op, cover.n, t, x, y, **kw)


def _shell_tail(edge: float, inner: float, floor: float) -> float:
    """Geometric-tail estimate beyond the last retained shell pair (both sides).

    Shells below ``floor`` (the numerical resolution of a shell value) carry
    no decay information; the tail is then reported at that floor.
    """
    if edge <= floor:
        return 2 * floor
    if 0 < edge < inner:
        rho = edge / inner
        return 2 * edge * rho / (1 - rho)
    return math.inf


def fold_kernel(op: ModelOperator, n: int, t: float, x: float, y: float, line_truncation: int | None = None, nodes: int = 64) -> tuple[np.ndarray, float]:
    """sum over beta in nZ of K_line(x, y + beta) times the deck phase.

    Returns the folded matrix and a tail estimate for |beta| beyond the
    truncation (geometric envelope of the last two retained shells).
    """
    if line_truncation is None:
        # Gaussian off-diagonal decay exp(-d^2/(4 t^2)): keep d up to ~ 11 t + 2
        line_truncation = int(math.ceil((11.0 * t + 2.0) / n)) + 1
    K = modes_for(op, t)
    ks = np.arange(-line_truncation, line_truncation + 1)
    samples = line_kernels(op, t, x, y + n * ks, nodes=nodes, K=K)
    total = sum(smp.value * deck_phase(op, k * n) for k, smp in zip(ks, samples))
    shell = [(abs(int(k)), float(np.max(np.abs(smp.value)))) for k, smp in zip(ks, samples)]
    floor = max(smp.error_bound for smp in samples)
    edge = max(v for k, v in shell if k == line_truncation)
    inner = max(v for k, v in shell if k == line_truncation - 1) if line_truncation > 0 else 0.0
    return total, _shell_tail(edge, inner, floor)


def verify_folding(op: ModelOperator, n: int, t: float, x: float, y: float, **kw) -> float:
    folded, _ = fold_kernel(op, n, t, x, y, **kw)
    direct = finite_kernel(op, n, t, x, y).value
    return float(np.max(np.abs(folded - direct)))


def fold_finite(op: ModelOperator, n_from: int, n_to: int, t: float, x: float, y: float) -> np.ndarray:
    """Fold the n_from-cover kernel to the n_to-cover (n_to | n_from)."""
    if n_from % n_to:
        raise ValueError("target cover degree must divide source degree")
    val = np.zeros((op.components, op.components), dtype=complex)
    for k in range(n_from // n_to):
        beta = k * n_to
        val = val + finite_kernel(op, n_from, t, x, y + beta).value * deck_phase(op, beta)
    return val


# --- delocalized traces ---------------------------------------------------------


def cell_traces(op: ModelOperator, kappas, t: np.ndarray, K: int) -> np.ndarray:
    """T(kappa, t) = sum_b lambda_b exp(-t^2 lambda_b^2), shape (len(kappas), len(t))."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty((len(kappas), len(t)))
    for i, kappa in enumerate(kappas):
        ev = cell_eigenvalues(op, float(kappa), K)
        out[i] = f_heat(ev[None, :], t[:, None]).sum(axis=1)
    return out


def cell_abs_traces(op: ModelOperator, kappas, t: np.ndarray, K: int) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty((len(kappas), len(t)))
    for i, kappa in enumerate(kappas):
        ev = cell_eigenvalues(op, float(kappa), K)
        out[i] = np.abs(f_heat(ev[None, :], t[:, None])).sum(axis=1)
    return out


@dataclass
class BlochRule:
    """Quadrature over the Bloch parameter: kappa nodes, weights and class phases."""

    kappas: np.ndarray
    weights: np.ndarray
    label: str = ""

    def phases(self, theta: float, a: int) -> np.ndarray:
        return np.exp(-1j * TWO_PI * (self.kappas - theta) * a)

    @classmethod
    def for_cover(cls, op: ModelOperator, cover: CoverSpec, nodes: int = 64) -> BlochRule:
        if cover.is_line:
            k, w = gauss_legendre_01(nodes)
            return cls(k, w, f"gauss-legendre-{nodes}")
        n = cover.n
        return cls(cover_kappas(op, n), np.full(n, 1.0 / n), f"cover-{n}")


def deloc_trace_spectral(op: ModelOperator, cover: CoverSpec, a: int, t, K: int | None = None, nodes: int = 64) -> np.ndarray:
    """tr_<a>(D e^{-t^2 D^2}) from cell spectra; complex array over t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    K = K or modes_for(op, float(np.min(t)))
    rule = BlochRule.for_cover(op, cover, nodes)
    T = cell_traces(op, rule.kappas, t, K)
    return (rule.weights * rule.phases(op.theta, a)) @ T


def deloc_trace(
    op: ModelOperator,
    cover: CoverSpec,
    a: int,
    t: float,
    method: Literal["spectral", "kernel"] = "spectral",
    allow_identity: bool = False,
    x_nodes: int = 16,
) -> complex:
    """sum over gamma in <a> of int_0^1 tr K_t(x, gamma x) dx.

    ``method="kernel"`` integrates the kernel diagonal over x with
    Gauss-Legendre nodes (line kernel via Bloch quadrature); the default uses
    the orthonormality of cell eigenfunctions, which makes the x-integral exact.
    """
    if cover.is_line and a == 0 and not allow_identity:
        raise ValueError("identity class on the line is disabled")
    if not cover.is_line:
        a = a % cover.n
    if method == "spectral":
        return complex(deloc_trace_spectral(op, cover, a, [t])[0])
    xs, ws = gauss_legendre_01(x_nodes)
    total = 0.0 + 0.0j
    for x, w in zip(xs, ws):
        s = heat_kernel(op, cover, t, float(x), float(x) + a)
        total += w * np.trace(s.value) * deck_phase(op, a)
    return complex(total)


@dataclass
class L1Norm:
    value: float
    tail_bound: float
    argmax: tuple[float, float]


def l1_norm(op: ModelOperator, t: float, truncation: int = 6, grid: int = 5, nodes: int = 64) -> L1Norm:
    """sup over (x, y) in a grid on [0,1)^2 of sum_gamma ||K_t(x, y + gamma)|| on the line.

    The kernel norm is the spectral norm. The tail beyond |gamma| > truncation
    is estimated from the geometric decay of the last retained shells.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    K = modes_for(op, t)
    pts = np.arange(grid) / grid
    best = (-1.0, 0.0, (0.0, 0.0))
    for x in pts:
        for y in pts:
            shells = {}
            floor = LINE_KERNEL_TOL
            gs = np.arange(-truncation, truncation + 1)
            for g, smp in zip(gs, line_kernels(op, t, float(x), float(y) + gs, nodes=nodes, K=K, certify=False)):
                shells[int(g)] = float(np.linalg.norm(smp.value, 2))
                floor = max(floor, LINE_KERNEL_TOL + smp.error_bound)
            total = sum(shells.values())
            edge = max(shells[truncation], shells[-truncation])
            inner = max(shells[truncation - 1], shells[-(truncation - 1)])
            tail = _shell_tail(edge, inner, floor)
            if total > best[0]:
                best = (total, tail, (float(x), float(y)))
    return L1Norm(best[0], best[1], best[2])
