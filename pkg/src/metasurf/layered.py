"""Transfer and scattering matrices for planar stacks, and surface-plasmon
dispersion root finding (single interface and thin film).

Amplitude convention: 2-vectors are ordered (H^+, H^-), i.e. up- and
down-going magnetic modal amplitudes.  A transfer matrix maps amplitudes on
one side of a region to the other side; the scattering form maps incoming to
outgoing amplitudes.  The bound-mode (surface plasmon) condition is the pole
of the scattering matrix, M_-- = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .constants import Z_0, c
from .emcore import (DrudeLorentzModel, Medium, ReciprocalVector, sgn,
                     permittivity, z_wavenumber)


class LayeredError(Exception):
    pass


class ScatteringPoleError(LayeredError):
    """M_-- = 0: the transfer matrix sits exactly on a bound state."""


class RootConvergenceError(LayeredError):
    """Bisection failed to converge inside a valid bracket."""


@dataclass(frozen=True)
class TransferMatrix2:
    """2x2 transfer matrix with an optional log-magnitude scale.

    The represented matrix is ``entries * exp(log_scale)``.  The scale is
    split off when strongly evanescent propagation phases would overflow
    double precision (|Im K| d > 300 per half-phase factor).  ``det_entries``
    optionally carries an analytically computed determinant of ``entries``
    for use when the naive 2x2 determinant would underflow.
    """

    entries: np.ndarray
    log_scale: float = 0.0
    det_entries: complex | None = None

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != (2, 2):
            raise ValueError("transfer matrix must be 2x2")
        if not np.all(np.isfinite(e)):
            raise ValueError("transfer matrix entries must be finite")
        object.__setattr__(self, "entries", e)

    @property
    def value(self) -> np.ndarray:
        """The full matrix; may overflow if log_scale is extreme."""
        return self.entries * math.exp(self.log_scale)

    def det(self) -> complex:
        d = self.det_entries
        if d is None:
            e = self.entries
            d = e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]
        return d


@dataclass(frozen=True)
class ScatteringMatrix2:
    """2x2 scattering matrix: outgoing = S . incoming."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != (2, 2):
            raise ValueError("scattering matrix must be 2x2")
        object.__setattr__(self, "entries", e)


@dataclass(frozen=True)
class FilmStack:
    """Planar film: eps_v above (z > +d/2), eps_m inside, eps_i below."""

    eps_v: complex
    eps_m: complex
    eps_i: complex
    d: float

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("film thickness must be positive")


def matching_matrix(k: ReciprocalVector, medium: Medium,
                    polarization: str) -> TransferMatrix2:
    """Single-medium matching matrix relating (H^+, H^-) to the tangential
    field components at an interface.

        M_pp = Z_0 sgn(omega) sgn(k_x) [[+K/(eps k_0), -K/(eps k_0)],
                                        [+1,           +1          ]]
        M_ss = Z_0 sgn(k_x) [[+K, -K], [k_0, k_0]] / sqrt(|K|^2 + k_par^2)

    In-plane convention (k_y = 0); sgn(0) := +1 for both omega and k_x.
    """
    eps = medium.permittivity
    big_k = z_wavenumber(k, eps)
    k_0 = k.k_0
    if polarization == "p":
        pref = Z_0 * sgn(k.omega) * sgn(k.k_x)
        a = big_k / (eps * k_0)
        m = pref * np.array([[a, -a], [1.0, 1.0]], dtype=complex)
    elif polarization == "s":
        pref = Z_0 * sgn(k.k_x)
        root = math.sqrt(abs(big_k) ** 2 + k.k_par ** 2)
        m = pref * np.array([[big_k / root, -big_k / root],
                             [k_0 / root, k_0 / root]], dtype=complex)
    else:
        raise ValueError("polarization must be 's' or 'p'")
    return TransferMatrix2(m)


def scattering_from_transfer(m: TransferMatrix2) -> ScatteringMatrix2:
    """Convert a transfer matrix to scattering form.

        S[(M++ M+-; M-+ M--)] = (1/M--) (M+-, M++ M-- - M+- M-+;
                                         1,   -M-+)

    The (1,2) entry is det(M)/M--; it honours the log-scale / analytic-det
    representation so that strongly evanescent films convert without overflow.
    M-- = 0 is the bound-state pole and raises :class:`ScatteringPoleError`.
    """
    e = m.entries
    mmm = e[1, 1]
    if mmm == 0:
        raise ScatteringPoleError("M_-- = 0 (bound state)")
    s11 = e[0, 1] / mmm
    s12 = _scaled(m.det() / mmm, m.log_scale)
    s21 = _safe_exp(-m.log_scale) / mmm
    s22 = -e[1, 0] / mmm
    return ScatteringMatrix2(np.array([[s11, s12], [s21, s22]], dtype=complex))


def _scaled(x: complex, log_scale: float) -> complex:
    """x * exp(log_scale) evaluated in the log domain so that a huge scale
    against a tiny x does not overflow on the way through."""
    if x == 0 or log_scale == 0.0:
        return x if log_scale == 0.0 else x * 0.0
    mag = abs(x)
    total = math.log(mag) + log_scale
    if total < -745.0:
        return 0.0 + 0.0j
    if total > 709.0:
        raise OverflowError("scaled transfer entry exceeds double range")
    return (x / mag) * math.exp(total)


def _safe_exp(x: float) -> float:
    # exp that saturates to 0 instead of overflowing the opposite branch
    if x < -745.0:
        return 0.0
    return math.exp(x)


def half_phase_matrix(k: ReciprocalVector, eps: complex, d: float) -> np.ndarray:
    """C = diag(e^{i phi+}, e^{i phi-}) with phi^sigma = sigma K d / 2."""
    big_k = z_wavenumber(k, eps)
    return np.array([[np.exp(1j * big_k * d / 2.0), 0.0],
                     [0.0, np.exp(-1j * big_k * d / 2.0)]], dtype=complex)


def single_interface_transfer(k: ReciprocalVector, medium_1: Medium,
                              medium_2: Medium,
                              polarization: str) -> TransferMatrix2:
    """M^{12} = (M^1)^-1 M^2 relating amplitudes across one interface."""
    m1 = matching_matrix(k, medium_1, polarization).entries
    m2 = matching_matrix(k, medium_2, polarization).entries
    return TransferMatrix2(np.linalg.solve(m1, m2))


def film_transfer(stack: FilmStack, k: ReciprocalVector,
                  polarization: str) -> TransferMatrix2:
    """Total film transfer  M^{vm} C^m C^m M^{mi}.

    C^m C^m carries the full propagation phase across the film.  When
    |Im K^m| d/2 exceeds 300 the growing exponential is split off into
    ``log_scale`` (with the analytic determinant kept alongside) so the
    entries stay inside double range.
    """
    m_vm = single_interface_transfer(k, Medium(stack.eps_v),
                                     Medium(stack.eps_m), polarization)
    m_mi = single_interface_transfer(k, Medium(stack.eps_m),
                                     Medium(stack.eps_i), polarization)
    big_k = z_wavenumber(k, stack.eps_m)
    growth = big_k.imag * stack.d  # full-thickness decay exponent
    if growth / 2.0 > 300.0:
        # C C = e^{growth} diag(e^{i Re(K) d} e^{-2 growth}, e^{-i Re(K) d})
        cc = np.array([
            [np.exp(1j * big_k.real * stack.d) * _safe_exp(-2.0 * growth), 0.0],
            [0.0, np.exp(-1j * big_k.real * stack.d)]], dtype=complex)
        ent = m_vm.entries @ cc @ m_mi.entries
        det = (m_vm.det() * m_mi.det()
               * _safe_exp(-2.0 * growth) * np.exp(0j))
        return TransferMatrix2(ent, log_scale=growth, det_entries=det)
    cc = half_phase_matrix(k, stack.eps_m, stack.d)
    cc = cc @ cc
    return TransferMatrix2(m_vm.entries @ cc @ m_mi.entries)


def xi_ratio(k: ReciprocalVector, eps_m: complex, eps_v: complex) -> complex:
    """xi^{mv} = -(K^m / eps^m) / (K^v / eps^v); the single-interface TM
    surface mode sits at xi = 1."""
    return (-(z_wavenumber(k, eps_m) / eps_m)
            / (z_wavenumber(k, eps_v) / eps_v))


def spp_single_explicit(k_par: float, model: DrudeLorentzModel,
                        eps_v: float = 1.0):
    """Surface-plasmon and bulk branches at a single metal interface.

    For eps_v = 1 the implicit TM condition xi = 1 closes to

        omega = sqrt(omega_sp^2 + c^2 k_par^2
                     -+ sqrt(omega_sp^4 + c^4 k_par^4)).

    The lower branch tends to omega_sp at large k_par and stays below the
    light line; the upper branch is the bulk mode above omega_p.  For
    eps_v != 1 the closed form does not apply and the branches are obtained
    from the cubic in omega^2 equivalent to xi^2 = 1 (lower branch verified
    against the xi residual).

    Returns
    -------
    (omega_lower, omega_upper) in rad/s
    """
    if k_par < 0:
        raise ValueError("k_par must be non-negative")
    if eps_v == 1.0:
        wsp2 = model.omega_sp ** 2
        ck2 = (c * k_par) ** 2
        inner = math.sqrt(wsp2 ** 2 + ck2 ** 2)
        # conjugate form of wsp2 + ck2 - inner; same value, no cancellation
        # at large k_par where the branch hugs omega_sp
        lower = math.sqrt(2.0 * wsp2 * ck2 / (wsp2 + ck2 + inner))
        upper = math.sqrt(wsp2 + ck2 + inner)
        return lower, upper
    return _single_branches_general(k_par, model, eps_v)


def _single_branches_general(k_par: float, model: DrudeLorentzModel,
                             eps_v: float):
    # xi^2 = 1 squared condition as a cubic in u = omega^2:
    #   (k^2 - (u - P)/c^2) eps_v^2 u^2 = (k^2 - u eps_v / c^2) (u - P)^2
    p = model.omega_p ** 2
    k2 = k_par ** 2
    ev = eps_v
    # expand both sides in powers of u
    lhs = np.array([-ev ** 2 / c ** 2,
                    ev ** 2 * (k2 + p / c ** 2),
                    0.0, 0.0])          # u^3, u^2, u^1, u^0
    rhs = np.array([-ev / c ** 2,
                    k2 + 2.0 * p * ev / c ** 2,
                    -(2.0 * p * k2 + p ** 2 * ev / c ** 2),
                    p ** 2 * k2])
    coeffs = lhs - rhs
    roots = np.roots(coeffs)
    real = sorted(float(r.real) for r in roots
                  if abs(r.imag) < 1e-8 * max(abs(r), 1.0) and r.real > 0)
    omegas = [math.sqrt(u) for u in real]
    bound = [w for w in omegas
             if w < c * k_par / math.sqrt(ev)
             and abs(xi_ratio(ReciprocalVector(k_par, 0.0, w),
                              permittivity(model, w), ev) - 1.0) < 1e-6]
    lower = bound[0] if bound else float("nan")
    upper = max(omegas) if omegas else float("nan")
    return lower, upper


def quasistatic_film_modes(k_par: float, d: float, omega_sp: float):
    """Closed-form quasistatic film pair omega_sp sqrt(1 -+ e^{-k_par d}).

    Returns (omega_even, omega_odd); even is the lower branch.
    """
    if k_par <= 0 or d <= 0:
        raise ValueError("k_par and d must be positive")
    e = math.exp(-k_par * d)
    return omega_sp * math.sqrt(1.0 - e), omega_sp * math.sqrt(1.0 + e)


@dataclass(frozen=True)
class FilmRoot:
    """One film dispersion root with its parity tag.

    ``branch_sign`` records which sign of the symmetric-film condition
    (1 - xi)/(1 + xi) = sign * e^{-Im K^m d} the root satisfies:
    +1 is the even (lower) mode, -1 the odd (upper) mode.
    """

    omega: float
    parity: str
    branch_sign: int = 0


def _film_kernels(k_par: float, model: DrudeLorentzModel, stack_eps,
                  d: float, quasistatic: bool):
    eps_v, eps_i = stack_eps

    def make(omega):
        eps_m = permittivity(model, omega).real
        if quasistatic:
            xi_v = -eps_v / eps_m
            xi_i = -eps_i / eps_m
            decay = k_par * d
        else:
            k = ReciprocalVector(k_par, 0.0, omega)
            xi_v = xi_ratio(k, eps_m, eps_v).real
            xi_i = xi_ratio(k, eps_m, eps_i).real
            decay = z_wavenumber(k, eps_m).imag * d
        return xi_v, xi_i, decay

    return make


def film_dispersion_solve(stack: FilmStack, k_par: float,
                          model: DrudeLorentzModel,
                          quasistatic: bool = False,
                          n_grid: int = 2048) -> list[FilmRoot]:
    """Real roots of the film TM dispersion relation at fixed k_par.

        (1 - xi^{mv})/(1 + xi^{mv}) . (1 - xi^{mi})/(1 + xi^{mi})
            = e^{-2 Im K^m d}

    The film permittivity is ``model`` evaluated at each trial frequency;
    ``stack.eps_m`` is ignored here (it only matters for fixed-frequency
    transfer-matrix work).

    For the symmetric film (eps_i = eps_v) the two factors split into
    (1 - xi)/(1 + xi) = +- e^{-Im K^m d}, and each branch is solved
    separately (the product form becomes tangent to zero at large k_par d
    and loses both sign changes).  Roots are bracketed on a logarithmic
    omega grid and polished by bisection to 1e-12 relative.

    The search window is (0, min(light lines, omega_p)): bound modes need
    decaying tails on both outer sides and a negative-permittivity core.
    With ``quasistatic=True`` the c -> infinity kernels are used instead
    (K -> i k_par everywhere), which reproduces the closed-form pair of
    :func:`quasistatic_film_modes` for the symmetric film.

    Returns an empty list when no bracket exists (k_par too small for a
    bound mode); raises :class:`RootConvergenceError` only if bisection
    inside a valid bracket fails.
    """
    if k_par <= 0:
        return []
    eps_v = stack.eps_v.real if isinstance(stack.eps_v, complex) else stack.eps_v
    eps_i = stack.eps_i.real if isinstance(stack.eps_i, complex) else stack.eps_i
    kern = _film_kernels(k_par, model, (eps_v, eps_i), stack.d, quasistatic)

    if quasistatic:
        omega_hi = model.omega_p * (1.0 - 1e-9)
    else:
        omega_hi = min(c * k_par / math.sqrt(max(eps_v, eps_i)),
                       model.omega_p) * (1.0 - 1e-9)
    omega_lo = omega_hi * 1e-6
    grid = np.geomspace(omega_lo, omega_hi, n_grid)

    symmetric = eps_i == eps_v

    def residual_branch(sign):
        def f(omega):
            xi_v, _, decay = kern(omega)
            return (1.0 - xi_v) / (1.0 + xi_v) - sign * math.exp(-decay)
        return f

    def residual_product(omega):
        xi_v, xi_i, decay = kern(omega)
        return ((1.0 - xi_v) / (1.0 + xi_v)
                * (1.0 - xi_i) / (1.0 + xi_i)
                - math.exp(-2.0 * decay))

    roots: list[FilmRoot] = []
    if symmetric:
        for sign, parity in ((+1, "even"), (-1, "odd")):
            f = residual_branch(sign)
            for w in _bracketed_roots(f, grid):
                roots.append(FilmRoot(w, parity, sign))
    else:
        found = _bracketed_roots(residual_product, grid)
        found.sort()
        # parity by continuity from the symmetric film: lower root even
        for i, w in enumerate(found):
            roots.append(FilmRoot(w, "even" if i == 0 else "odd"))
    roots.sort(key=lambda r: r.omega)
    return roots


def _bracketed_roots(f, grid) -> list[float]:
    vals = np.array([f(w) for w in grid])
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0.0:
            try:
                w = bisect(f, grid[i], grid[i + 1],
                           rtol=1e-13, maxiter=200)
            except RuntimeError as exc:  # pragma: no cover - defensive
                raise RootConvergenceError(str(exc)) from exc
            roots.append(float(w))
    return roots


def film_bound_state_residual(stack: FilmStack, k: ReciprocalVector,
                              polarization: str = "p") -> complex:
    """1/det S of the film transfer, whose zeros are the bound modes.

    det S[M] = -M++/M--, so the bound-state condition 1/det S = 0 is
    M--/M++ = 0; this returns -M--/M++ for direct comparison with the
    xi-product dispersion residual.
    """
    m = film_transfer(stack, k, polarization)
    e = m.entries
    return -e[1, 1] / e[0, 0]
