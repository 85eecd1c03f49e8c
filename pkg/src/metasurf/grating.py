"""Diffraction from a surface whose profile is a travelling wave,
a(x, t) = A sin(g x - Omega t), separating two non-dispersive dielectrics.

The boundary-matching equations are Fourier expanded over Floquet replicas
k_m = (k_x + m g, omega_in + m Omega); the Jacobi-Anger identity turns the
profile phase factors into Bessel-function coefficient matrices which are
truncated at |m| <= m_cut and solved as one dense block system per incident
wave.  Temporal modulation adds a surface-current source term: the moving
boundary drags the induced polarisation of the lower medium, which is what
breaks the +m/-m diffraction symmetry and, for superluminal profile
velocities, radiates even with a DC drive.

Polarisation conventions: the s solver works in electric modal amplitudes,
the p solver in magnetic ones (converted to electric amplitudes through the
diagonal modal-impedance matrix).  In both cases slot m = 0 of the incident
vector carries the drive.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import jv

from .constants import Z_0, c
from .emcore import ReciprocalVector, sgn, z_wavenumber


class GratingError(Exception):
    pass


class DeepGratingError(GratingError):
    """g*A > 0.5: the global coordinate translation behind this formalism
    loses its near-diagonal structure for deep profiles; local coordinate
    distortion methods are required instead."""


class SingularReplicaError(GratingError):
    """A replica has zero frequency but non-zero in-plane momentum, making
    its matching rows infinite."""

    def __init__(self, order):
        super().__init__(f"replica m={order} has omega_m = 0 with k_x,m != 0")
        self.order = order


class WoodAnomalyError(GratingError):
    """The block system is (near-)singular because a diffraction order sits
    at grazing emergence (K_m = 0)."""

    def __init__(self, order, condition=float("inf")):
        super().__init__(
            f"near-singular system at harmonic m={order} "
            f"(condition number {condition:.3e})")
        self.order = order
        self.condition = condition


class BesselEvaluationError(GratingError):
    def __init__(self, order, argument):
        super().__init__(f"J_{order}({argument!r}) evaluation failed")
        self.order = order
        self.argument = argument


@dataclass(frozen=True)
class GratingConfig:
    """Geometry, media and drive of one scattering problem."""

    amplitude: float            # modulation depth A [m]
    g: float                    # spatial frequency [rad/m]
    omega_mod: float            # temporal frequency Omega [rad/s]
    eps_above: complex          # eps^> (incidence side)
    eps_below: complex          # eps^<
    m_cut: int                  # Floquet cutoff, orders in [-m_cut, m_cut]
    omega_in: float             # incident angular frequency [rad/s]
    theta_in: float             # incident angle [rad]
    polarization: str = "s"
    e_in: float = 1.0           # incident electric amplitude [V/m]

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        if self.g <= 0:
            raise ValueError("g must be positive")
        if self.m_cut < 1:
            raise ValueError("m_cut must be at least 1")
        if self.polarization not in ("s", "p"):
            raise ValueError("polarization must be 's' or 'p'")
        if self.omega_mod > 0 and self.amplitude >= 2.0 * math.pi * c / self.omega_mod:
            raise ValueError(
                "surface z-velocity would exceed c (need A < 2 pi c / Omega)")
        if self.g * self.amplitude > 0.5:
            raise DeepGratingError(
                f"g*A = {self.g * self.amplitude:.3g} > 0.5; shallow-profile "
                "coordinate translation is invalid here, see the local "
                "coordinate distortion literature")

    @property
    def v_ph(self) -> float:
        """Profile phase velocity Omega / g."""
        return self.omega_mod / self.g

    @property
    def alpha(self) -> complex:
        """Permittivity step eps^< - eps^>."""
        return self.eps_below - self.eps_above

    @property
    def k_x(self) -> float:
        """In-plane incident wavenumber; in-plane convention (k_y = 0)."""
        return math.sqrt(self.eps_above.real) \
            * self.omega_in / c * math.sin(self.theta_in)

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.m_cut, self.m_cut + 1)

    @property
    def size(self) -> int:
        return 2 * self.m_cut + 1


def boundary_geometry(cfg: GratingConfig, x: float, t: float):
    """Profile value and local frame at (x, t).

    Returns (a, a_slope, a_dot, t1, t2, n, eta): height, d/dx, d/dt, the two
    tangent unit vectors, the unit normal and the line-stretching ratio
    eta = sqrt(1 + a'^2).
    """
    phase = cfg.g * x - cfg.omega_mod * t
    a = cfg.amplitude * math.sin(phase)
    slope = cfg.amplitude * cfg.g * math.cos(phase)
    a_dot = -cfg.amplitude * cfg.omega_mod * math.cos(phase)
    eta = math.sqrt(1.0 + slope * slope)
    t1 = np.array([1.0, 0.0, slope]) / eta
    t2 = np.array([0.0, 1.0, 0.0])
    n = np.array([-slope, 0.0, 1.0]) / eta
    return a, slope, a_dot, t1, t2, n, eta


@dataclass(frozen=True)
class ReplicaSet:
    """Per-replica kinematics shared by all coefficient matrices."""

    orders: np.ndarray
    omega: np.ndarray          # omega_in + m Omega
    k_x: np.ndarray            # k_x + m g
    k_par: np.ndarray          # |k_x,m|
    k0_abs: np.ndarray         # |omega_m| / c
    k0_signed: np.ndarray      # omega_m / c
    sgn_w: np.ndarray          # sgn(omega_m), sgn(0) = +1
    ratio_x: np.ndarray        # k_x,m / k_par,m, 0/0 -> +1
    k_above: np.ndarray        # K^> per replica
    k_below: np.ndarray        # K^< per replica
    degenerate: np.ndarray     # omega_m = 0 and k_x,m = 0

    def k_z(self, tau: str) -> np.ndarray:
        return self.k_above if tau == ">" else self.k_below


def replica_set(cfg: GratingConfig) -> ReplicaSet:
    m = cfg.orders
    omega = cfg.omega_in + m * cfg.omega_mod
    kx = cfg.k_x + m * cfg.g
    kpar = np.abs(kx)
    k0s = omega / c
    k0a = np.abs(k0s)
    sgn_w = np.where(omega < 0, -1.0, 1.0)
    ratio_x = np.where(kx < 0, -1.0, 1.0)
    degenerate = (omega == 0.0) & (kx == 0.0)
    bad = (omega == 0.0) & (kx != 0.0)
    if np.any(bad):
        raise SingularReplicaError(int(m[np.argmax(bad)]))
    k_ab = np.array([z_wavenumber(ReciprocalVector(float(kxi), 0.0, float(w)),
                                  cfg.eps_above)
                     for kxi, w in zip(kx, omega)])
    k_be = np.array([z_wavenumber(ReciprocalVector(float(kxi), 0.0, float(w)),
                                  cfg.eps_below)
                     for kxi, w in zip(kx, omega)])
    return ReplicaSet(m, omega, kx, kpar, k0a, k0s, sgn_w, ratio_x,
                      k_ab, k_be, degenerate)


def _bessel(orders, argument):
    vals = jv(orders, argument)
    if np.any(np.isnan(np.atleast_1d(vals))):
        bad = int(np.atleast_1d(orders).flat[
            int(np.argmax(np.isnan(np.atleast_1d(vals))))])
        raise BesselEvaluationError(bad, argument)
    return vals


def _ratio_Kk0(rep: ReplicaSet, cfg: GratingConfig, tau: str) -> np.ndarray:
    """K^tau_m / |k0_m| with the DC-replica limit sqrt(eps^tau)."""
    eps = cfg.eps_above if tau == ">" else cfg.eps_below
    kz = rep.k_z(tau)
    out = np.empty(len(rep.orders), dtype=complex)
    for i in range(len(out)):
        if rep.degenerate[i]:
            out[i] = cmath.sqrt(eps)
        else:
            if rep.k0_abs[i] == 0.0:  # pragma: no cover - caught earlier
                raise SingularReplicaError(int(rep.orders[i]))
            out[i] = kz[i] / rep.k0_abs[i]
    return out


def _m_element_rows(cfg, rep, sigma, tau, rows):
    """Columns of the M matrix for arbitrary (possibly out-of-range) rows."""
    n = cfg.size
    kz = rep.k_z(tau)
    out = np.zeros((len(rows), n), dtype=complex)
    for j in range(n):
        phi = sigma * kz[j] * cfg.amplitude
        orders = np.asarray(rows) - rep.orders[j]
        out[:, j] = rep.ratio_x[j] * rep.sgn_w[j] * _bessel(orders, phi)
    return out


def _n_element_rows(cfg, rep, sigma, tau, rows):
    """Columns of the N matrix for arbitrary rows.

        [N]_{lm} = ( (k_x,m/k_par,m) sigma K_m / |k0_m|
                     - (l-m) g / (sigma K_m) * k_par,m / |k0_m| ) J_{l-m}(phi_m)
    """
    n = cfg.size
    kz = rep.k_z(tau)
    r_kk0 = _ratio_Kk0(rep, cfg, tau)
    out = np.zeros((len(rows), n), dtype=complex)
    for j in range(n):
        phi = sigma * kz[j] * cfg.amplitude
        orders = np.asarray(rows) - rep.orders[j]
        bes = _bessel(orders, phi)
        first = rep.ratio_x[j] * sigma * r_kk0[j]
        if rep.degenerate[j]:
            second = np.zeros(len(rows), dtype=complex)
        else:
            kp_k0 = rep.k_par[j] / rep.k0_abs[j]
            if kz[j] == 0.0:
                if np.any((orders != 0) & (bes != 0.0)):
                    raise WoodAnomalyError(int(rep.orders[j]))
                second = np.zeros(len(rows), dtype=complex)
            else:
                second = orders * cfg.g / (sigma * kz[j]) * kp_k0
        out[:, j] = (first - second) * bes
    return out


def build_matrices_s(cfg: GratingConfig, rep: ReplicaSet | None = None):
    """All coefficient matrices of the s-polarised block system.

    Returns a dict with keys 'M-+>', 'M+>', 'M-<', 'N->', 'N+>', 'N-<', 'L'
    spelled as ('M', sigma, tau) tuples.  The source matrix is

        [L]_{lm} = (alpha/c) (l-m) Omega / (-K^<_m)
                   sgn(omega_m) (k_x,m/k_par,m) J_{l-m}(-K^<_m A),

    equivalently (A Omega alpha / 2c) times row-shifted M^{-<} columns via
    the Bessel recurrence; it vanishes identically for a static profile.
    """
    if rep is None:
        rep = replica_set(cfg)
    rows = rep.orders
    mats = {}
    for sigma, tau in ((-1, ">"), (+1, ">"), (-1, "<")):
        mats[("M", sigma, tau)] = _m_element_rows(cfg, rep, sigma, tau, rows)
        mats[("N", sigma, tau)] = _n_element_rows(cfg, rep, sigma, tau, rows)
    mats["L"] = _l_matrix_s(cfg, rep, rows)
    return mats


def _l_matrix_s(cfg, rep, rows):
    """Source matrix via the row-shifted form

        [L]_{lm} = (A Omega alpha / 2c) ( [M^{-<}]_{l-1,m} + [M^{-<}]_{l+1,m} ),

    which equals the quotient form (alpha/c) (l-m) Omega / (-K^<_m)
    sgn(omega_m) (k_x,m/k_par,m) J_{l-m}(phi) by the Bessel recurrence
    J_{n-1} + J_{n+1} = (2n/z) J_n, but stays finite where K^<_m -> 0
    (the 1/K pole is cancelled by the Bessel zero; in particular the
    DC-degenerate replica couples to its first neighbours with A/2)."""
    n = cfg.size
    if cfg.omega_mod == 0.0:
        return np.zeros((len(rows), n), dtype=complex)
    rows = np.asarray(rows)
    m_lo = _m_element_rows(cfg, rep, -1, "<", rows - 1)
    m_hi = _m_element_rows(cfg, rep, -1, "<", rows + 1)
    pref = cfg.amplitude * cfg.omega_mod * cfg.alpha / (2.0 * c)
    return pref * (m_lo + m_hi)


def _l_matrix_p(cfg, rep, rows):
    """p-polarised source matrix.

    Derived the same way as the s-polarised one: the cosine of the surface
    velocity splits into e^{+- i q.x}, shifting the output harmonic of the
    tangential-E expansion by one, so

        [L~]_{lm} = (A Omega alpha / 2c) ( [N~^{-<}]_{l-1,m} + [N~^{-<}]_{l+1,m} )

    with N~ = N / eps^< and the shifted rows evaluated from the element
    formula (not the truncated matrix), so edge rows lose nothing.
    """
    n = cfg.size
    if cfg.omega_mod == 0.0:
        return np.zeros((n, n), dtype=complex)
    rows = np.asarray(rows)
    n_lo = _n_element_rows(cfg, rep, -1, "<", rows - 1) / cfg.eps_below
    n_hi = _n_element_rows(cfg, rep, -1, "<", rows + 1) / cfg.eps_below
    pref = cfg.amplitude * cfg.omega_mod * cfg.alpha / (2.0 * c)
    return pref * (n_lo + n_hi)


def impedance_diagonal(cfg: GratingConfig, rep: ReplicaSet,
                       tau: str) -> np.ndarray:
    """Diagonal p-polarisation modal impedances Z_{p, k_m}^tau."""
    eps = cfg.eps_above if tau == ">" else cfg.eps_below
    kz = rep.k_z(tau)
    out = np.empty(len(rep.orders), dtype=complex)
    for i in range(len(out)):
        if rep.degenerate[i]:
            out[i] = Z_0 / cmath.sqrt(eps)
        else:
            out[i] = Z_0 / eps * np.sqrt(
                (abs(kz[i]) ** 2 + rep.k_par[i] ** 2) / rep.k0_abs[i] ** 2)
    return out


@dataclass(frozen=True)
class DiffractionSolution:
    """Reflection/transmission matrices and the scattered replica amplitudes
    for one incident wave.  Electric amplitudes are primary; the p solver
    also exposes its native magnetic amplitudes."""

    config: GratingConfig
    replicas: ReplicaSet
    r_matrix: np.ndarray
    t_matrix: np.ndarray
    e_reflected: np.ndarray
    e_transmitted: np.ndarray
    condition_number: float
    h_reflected: np.ndarray | None = None
    h_transmitted: np.ndarray | None = None

    def order_index(self, m: int) -> int:
        return m + self.config.m_cut

    def reflected(self, m: int) -> complex:
        return self.e_reflected[self.order_index(m)]

    def transmitted(self, m: int) -> complex:
        return self.e_transmitted[self.order_index(m)]


_COND_LIMIT = 1e12


def _solve_block(top_left, top_right, bot_left, bot_right,
                 rhs_top, rhs_bot, incident, rep):
    n = top_left.shape[0]
    block = np.block([[top_left, top_right], [bot_left, bot_right]])
    cond = float(np.linalg.cond(block))
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        kz_all = np.concatenate([np.abs(rep.k_above), np.abs(rep.k_below)])
        worst = int(rep.orders[int(np.argmin(kz_all)) % len(rep.orders)])
        raise WoodAnomalyError(worst, cond)
    rhs = np.vstack([rhs_top, rhs_bot])
    rt = np.linalg.solve(block, -rhs)
    r_mat, t_mat = rt[:n, :], rt[n:, :]
    out = rt @ incident
    return r_mat, t_mat, out[:n], out[n:], cond


def solve_diffraction_s(cfg: GratingConfig) -> DiffractionSolution:
    """Solve the s-polarised system

        (M^{+>}  -M^{-<}        ) (E^{+>})   (-M^{->})
        (N^{+>}  -(N^{-<} + L)  ) (E^{-<}) = (-N^{->}) E^{->}

    for the reflected and transmitted electric replica amplitudes.  Raises
    :class:`WoodAnomalyError` when the block system is near-singular
    (condition number above 1e12), naming the grazing harmonic.
    """
    rep = replica_set(cfg)
    mats = build_matrices_s(cfg, rep)
    incident = np.zeros(cfg.size, dtype=complex)
    incident[cfg.m_cut] = cfg.e_in
    r_mat, t_mat, e_ref, e_tra, cond = _solve_block(
        mats[("M", +1, ">")], -mats[("M", -1, "<")],
        mats[("N", +1, ">")], -(mats[("N", -1, "<")] + mats["L"]),
        mats[("M", -1, ">")], mats[("N", -1, ">")], incident, rep)
    return DiffractionSolution(cfg, rep, r_mat, t_mat, e_ref, e_tra, cond)


def solve_diffraction_p(cfg: GratingConfig) -> DiffractionSolution:
    """Solve the p-polarised system in magnetic amplitudes,

        (M^{+>}   -(M^{-<} + L~) ) (H^{+>})   (-M^{->} )
        (N~^{+>}  -N~^{-<}       ) (H^{-<}) = (-N~^{->}) H^{->}

    with N~^{st} = N^{st}/eps^tau, then convert to electric amplitudes
    through the diagonal impedance matrices: E^{+>} = Z^> R Z^{>-1} E^{->},
    E^{-<} = Z^< T Z^{>-1} E^{->}.
    """
    rep = replica_set(cfg)
    rows = rep.orders
    m_pg = _m_element_rows(cfg, rep, +1, ">", rows)
    m_mg = _m_element_rows(cfg, rep, -1, ">", rows)
    m_ml = _m_element_rows(cfg, rep, -1, "<", rows)
    nt_pg = _n_element_rows(cfg, rep, +1, ">", rows) / cfg.eps_above
    nt_mg = _n_element_rows(cfg, rep, -1, ">", rows) / cfg.eps_above
    nt_ml = _n_element_rows(cfg, rep, -1, "<", rows) / cfg.eps_below
    l_tilde = _l_matrix_p(cfg, rep, rows)

    z_above = impedance_diagonal(cfg, rep, ">")
    z_below = impedance_diagonal(cfg, rep, "<")
    h_in = cfg.e_in / z_above[cfg.m_cut]
    incident = np.zeros(cfg.size, dtype=complex)
    incident[cfg.m_cut] = h_in

    r_mat, t_mat, h_ref, h_tra, cond = _solve_block(
        m_pg, -(m_ml + l_tilde),
        nt_pg, -nt_ml,
        m_mg, nt_mg, incident, rep)
    e_ref = z_above * h_ref
    e_tra = z_below * h_tra
    return DiffractionSolution(cfg, rep, r_mat, t_mat, e_ref, e_tra, cond,
                               h_reflected=h_ref, h_transmitted=h_tra)


def solve_diffraction(cfg: GratingConfig) -> DiffractionSolution:
    if cfg.polarization == "s":
        return solve_diffraction_s(cfg)
    return solve_diffraction_p(cfg)


def cerenkov_angle(v_ph: float, eps: float):
    """Emission angle of the diffracted harmonics for a DC-driven profile,

        theta = atan sqrt(v_ph^2 / (c/sqrt(eps))^2 - 1),

    identical for every order; None when v_ph <= c/sqrt(eps) (all harmonics
    evanescent)."""
    if v_ph < 0 or eps <= 0:
        raise ValueError("v_ph must be >= 0 and eps > 0")
    ratio = v_ph / (c / math.sqrt(eps))
    if ratio <= 1.0:
        return 0.0 if ratio == 1.0 else None
    return math.atan(math.sqrt(ratio * ratio - 1.0))


def flux_balance(sol: DiffractionSolution):
    """Fractional z-directed power in each propagating order, static lossless
    case.  Returns (reflected, transmitted) arrays normalised to the
    incident flux; their total sums to 1 when energy is conserved.
    """
    cfg = sol.config
    rep = sol.replicas
    if cfg.omega_mod != 0.0:
        raise GratingError("flux bookkeeping assumes a static profile")
    k_inc = rep.k_above[cfg.m_cut].real
    if k_inc <= 0:
        raise GratingError("incident wave is not propagating")
    if cfg.polarization == "s":
        inc = abs(cfg.e_in) ** 2 * k_inc
        refl = np.abs(sol.e_reflected) ** 2 * rep.k_above.real / inc
        tran = np.abs(sol.e_transmitted) ** 2 * rep.k_below.real / inc
    else:
        h_in = sol.h_reflected is not None
        if not h_in:
            raise GratingError("p flux needs magnetic amplitudes")
        eps_a, eps_b = cfg.eps_above, cfg.eps_below
        h0 = abs(cfg.e_in / impedance_diagonal(cfg, rep, ">")[cfg.m_cut]) ** 2
        inc = h0 * (rep.k_above[cfg.m_cut] / eps_a).real
        refl = np.abs(sol.h_reflected) ** 2 * (rep.k_above / eps_a).real / inc
        tran = np.abs(sol.h_transmitted) ** 2 * (rep.k_below / eps_b).real / inc
    return refl, tran


def reconstruct_fields(cfg: GratingConfig, sol: DiffractionSolution,
                       x: np.ndarray, z: np.ndarray, t: float = 0.0,
                       include_orders=None) -> np.ndarray:
    """Total electric field intensity |E|^2 on an (z, x) grid at time t.

    Above the instantaneous boundary the incident and reflected expansions
    are summed, below it the transmitted one; each replica carries its
    polarisation-vector components so inter-order interference is correct.
    ``include_orders`` restricts the scattered sums to a subset of harmonics
    (the incident wave is kept only if 0 is included), which is how the
    radiated part is isolated from a DC background.

    Returns an array of shape (len(z), len(x)).
    """
    rep = sol.replicas
    xg = np.asarray(x, dtype=float)[None, :]
    zg = np.asarray(z, dtype=float)[:, None]
    a_x = cfg.amplitude * np.sin(cfg.g * xg - cfg.omega_mod * t)
    above = zg >= a_x
    keep = set(rep.orders if include_orders is None else include_orders)

    comps = [np.zeros((len(z), len(x)), dtype=complex) for _ in range(3)]

    def add(amp, sigma, tau, i):
        if amp == 0.0:
            return
        kz = rep.k_z(tau)[i]
        phase = np.exp(1j * (rep.k_x[i] * xg + sigma * kz * zg
                             - rep.omega[i] * t))
        mask = above if tau == ">" else ~above
        pol = _e_polarization(cfg, rep, sigma, tau, i)
        for a in range(3):
            if pol[a] != 0.0:
                comps[a] += np.where(mask, pol[a] * amp * phase, 0.0)

    if 0 in keep:
        add(cfg.e_in, -1, ">", cfg.m_cut)
    for i, m in enumerate(rep.orders):
        if m not in keep:
            continue
        add(sol.e_reflected[i], +1, ">", i)
        add(sol.e_transmitted[i], -1, "<", i)

    total = np.zeros((len(z), len(x)))
    for a in range(3):
        total += np.real(comps[a]) ** 2
    return total


def _e_polarization(cfg, rep, sigma, tau, i):
    """Cartesian components of the electric polarisation vector of replica i."""
    if cfg.polarization == "s":
        # e_s = -sgn(omega) sgn(k_x) u_y
        return np.array([0.0, -rep.sgn_w[i] * rep.ratio_x[i], 0.0],
                        dtype=complex)
    kz = rep.k_z(tau)[i]
    if rep.degenerate[i]:
        eps = cfg.eps_above if tau == ">" else cfg.eps_below
        return np.array([sigma * cmath.sqrt(eps) / abs(cmath.sqrt(eps)),
                         0.0, 0.0], dtype=complex)
    norm = np.sqrt(abs(kz) ** 2 + rep.k_par[i] ** 2)
    return np.array([sigma * kz * rep.ratio_x[i] / norm, 0.0,
                     -rep.k_par[i] / norm], dtype=complex)


def boundary_field_mismatch(cfg: GratingConfig, sol: DiffractionSolution,
                            n_samples: int = 1000, t: float = 0.0) -> float:
    """Worst relative jump of the tangential electric field across the
    boundary, sampled along one period; the solved amplitudes should make
    this small (it is the continuity condition the solver enforced in the
    truncated Floquet basis)."""
    rep = sol.replicas
    xs = np.linspace(0.0, 2.0 * math.pi / cfg.g, n_samples, endpoint=False)
    worst = 0.0
    for x in xs:
        a, slope, _, t1, t2, _, eta = boundary_geometry(cfg, x, t)
        e_up = np.zeros(3, dtype=complex)
        e_dn = np.zeros(3, dtype=complex)

        def mode(amp, sigma, tau, i):
            kz = rep.k_z(tau)[i]
            ph = cmath.exp(1j * (rep.k_x[i] * x + sigma * kz * a
                                 - rep.omega[i] * t))
            return amp * ph * _e_polarization(cfg, rep, sigma, tau, i)

        e_up += mode(cfg.e_in, -1, ">", cfg.m_cut)
        for i in range(cfg.size):
            e_up += mode(sol.e_reflected[i], +1, ">", i)
            e_dn += mode(sol.e_transmitted[i], -1, "<", i)
        tang = t2 if cfg.polarization == "s" else t1
        jump = abs(np.dot(tang, e_up - e_dn))
        scale = max(abs(np.dot(tang, e_up)), abs(np.dot(tang, e_dn)), 1e-30)
        worst = max(worst, jump / scale)
    return worst


def wood_anomaly_angles(cfg: GratingConfig, n_scan: int = 20001):
    """Incidence angles (rad) where some diffraction order grazes
    (K^tau_m = 0), found by sign scanning |k_x,m| - sqrt(eps) |omega_m| / c
    over theta in (-pi/2, pi/2)."""
    thetas = np.linspace(-math.pi / 2 + 1e-6, math.pi / 2 - 1e-6, n_scan)
    angles = []
    for m in cfg.orders:
        if m == 0:
            continue
        w_m = cfg.omega_in + m * cfg.omega_mod
        for eps in (cfg.eps_above.real, cfg.eps_below.real):
            kx0 = math.sqrt(cfg.eps_above.real) * cfg.omega_in / c
            f = np.abs(kx0 * np.sin(thetas) + m * cfg.g) \
                - math.sqrt(eps) * abs(w_m) / c
            sign_change = np.nonzero(np.diff(np.sign(f)) != 0)[0]
            for i in sign_change:
                lo, hi = thetas[i], thetas[i + 1]
                angles.append(float(lo - f[i] * (hi - lo) / (f[i + 1] - f[i])))
    return sorted(angles)
