"""Standing-wave profiles for the focusing gNLS equation on a periodic cell.

A profile phi solves

    -phi'' + w*phi - |phi|^a * phi = 0,        x in [0, L),

and is produced here variationally: minimize the quadratic energy

    B_w(u) = 1/2 * int u_x^2 + w*u^2 dx

over the constraint set { int |u|^(a+2) dx = tau } inside a fixed parity
class, rescale the Lagrange multiplier to one, and polish with a Newton
iteration restricted to the same parity subspace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateSolutionError,
    InvalidMultiplierError,
    NewtonBasinError,
    ParameterError,
    ReductionError,
    SingularJacobianError,
    WaveAcceptanceError,
)
from .spectral import (
    COSINE,
    EVEN,
    NONE,
    ODD,
    SINE,
    ParityBasis,
    PeriodicGrid,
    RealField,
    build_grid,
    first_derivative,
    inner,
    integrate,
    l2_norm,
    resample,
)

#: max-norm residual above which the Newton polish refuses to start
NEWTON_BASIN_LIMIT = 1e-2

#: relative spectral amplitude below which a Fourier mode counts as inactive
PERIOD_DETECTION_RTOL = 1e-8


def _is_even_integer(x: float) -> bool:
    n = round(x)
    return abs(x - n) < 1e-9 and n >= 2 and n % 2 == 0


@dataclass(frozen=True)
class ProblemParams:
    """Model and constraint parameters for one standing-wave solve."""

    alpha: float
    omega: float
    period: float
    tau: float
    parity: str

    def __post_init__(self):
        for name in ("alpha", "omega", "period", "tau"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ParameterError(f"{name} must be positive and finite, got {v}")
        if self.parity not in (EVEN, ODD):
            raise ParameterError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if self.parity == ODD and not _is_even_integer(self.alpha):
            raise ParameterError(
                "odd parity requires even integer alpha "
                f"(sign-changing profiles need a smooth |u|^alpha); got alpha={self.alpha}"
            )


@dataclass(frozen=True)
class SolverConfig:
    """Numerical knobs for the variational solve and the Newton polish."""

    mode_count: int = 128
    max_outer_iterations: int = 20000
    gradient_tolerance: float = 1e-10
    newton_tolerance: float = 1e-11
    newton_max_steps: int = 30
    initial_guess: str = "auto"
    user_guess: Optional[np.ndarray] = None
    preconditioner: str = "sobolev_h1"

    def __post_init__(self):
        if self.initial_guess not in ("auto", "cosine_seed", "sine_seed", "user_supplied"):
            raise ParameterError(f"unknown initial_guess {self.initial_guess!r}")
        if self.preconditioner not in ("sobolev_h1", "none"):
            raise ParameterError(f"unknown preconditioner {self.preconditioner!r}")
        for name in ("gradient_tolerance", "newton_tolerance"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ParameterError(f"{name} must be positive, got {v}")
        if self.max_outer_iterations < 1 or self.newton_max_steps < 1:
            raise ParameterError("iteration limits must be at least 1")


@dataclass(frozen=True)
class WaveProfile:
    """Accepted or intermediate standing-wave record.

    For the output of :func:`minimize_constrained`, ``ode_residual_norm`` is
    the multiplier-equation residual ||-u'' + w u - c2 |u|^a u||_2 with
    c2 = 2*functional_value/constraint_value; after the unit rescaling it is
    the residual of the profile equation itself (c2 = 1).
    """

    params: ProblemParams
    phi: RealField
    ode_residual_norm: float
    functional_value: float
    constraint_value: float
    detected_period: Optional[float] = None

    @property
    def multiplier(self) -> float:
        """Lagrange multiplier c2 = 2 B_w(u) / int |u|^(a+2)."""
        return 2.0 * self.functional_value / self.constraint_value

    @property
    def wave_id(self) -> str:
        p = self.params
        return (
            f"{p.parity}-a{p.alpha:g}-w{p.omega:g}"
            f"-L{p.period:.9g}-N{self.phi.grid.size}"
        )


# ---------------------------------------------------------------------------
# functionals


def _power(values: np.ndarray, alpha: float) -> np.ndarray:
    """|u|^alpha * u evaluated pointwise (zero at u = 0 for fractional alpha)."""
    return np.abs(values) ** alpha * values


def functional_B(u: RealField, omega: float) -> float:
    """Quadratic energy 1/2 * int u_x^2 + w u^2 dx."""
    du = first_derivative(u)
    return 0.5 * (inner(du, du) + omega * inner(u, u))


def functionals_E_F(u: RealField, alpha: float) -> tuple[float, float]:
    """Conserved energy and mass of the time-dependent equation:

    E(u) = 1/2 int u_x^2 - 2/(a+2) |u|^(a+2) dx,   F(u) = 1/2 int u^2 dx.

    Satisfies B_w(u) = E(u) + w F(u) + 2/(a+2) int |u|^(a+2) dx.
    """
    du = first_derivative(u)
    power_integral = u.grid.spacing * float(np.sum(np.abs(u.values) ** (alpha + 2.0)))
    e = 0.5 * inner(du, du) - 2.0 * power_integral / (alpha + 2.0)
    f = 0.5 * inner(u, u)
    return e, f


def ode_residual_field(phi: RealField, alpha: float, omega: float) -> RealField:
    """Grid values of -phi'' + w phi - |phi|^a phi.

    Tagged parity 'none': near convergence the values are rounding noise
    with no usable symmetry.
    """
    xi = phi.grid.rfft_wavenumbers
    lap = np.fft.irfft(np.fft.rfft(phi.values) * (-(xi**2)), n=phi.grid.size)
    vals = -lap + omega * phi.values - _power(phi.values, alpha)
    return RealField(phi.grid, vals, NONE)


def ode_residual(phi: RealField, alpha: float, omega: float) -> float:
    """Discrete L2 norm of the profile-equation residual."""
    return l2_norm(ode_residual_field(phi, alpha, omega))


def detected_fundamental_period(phi: RealField) -> Optional[float]:
    """L / gcd(active modes); None for a constant profile."""
    coef = np.fft.rfft(phi.values)
    mags = np.abs(coef)
    scale = float(np.max(mags))
    if scale == 0.0:
        return None
    active = [n for n in range(1, len(coef)) if mags[n] > PERIOD_DETECTION_RTOL * scale]
    if not active:
        return None
    return phi.grid.length / math.gcd(*active)


# ---------------------------------------------------------------------------
# constrained minimization


def _seed_values(params: ProblemParams, config: SolverConfig, grid: PeriodicGrid) -> np.ndarray:
    kind = config.initial_guess
    if kind == "auto":
        kind = "cosine_seed" if params.parity == EVEN else "sine_seed"
    if kind == "user_supplied":
        if config.user_guess is None:
            raise ParameterError("initial_guess='user_supplied' needs config.user_guess")
        guess = np.asarray(config.user_guess, dtype=float)
        if guess.shape != (grid.size,):
            raise ParameterError(
                f"user guess has shape {guess.shape}, expected ({grid.size},)"
            )
        return guess.copy()
    x = grid.nodes
    if kind == "cosine_seed":
        if params.parity != EVEN:
            raise ParameterError("cosine seed has even parity; problem asks for odd")
        return 1.0 + 0.5 * np.cos(2.0 * np.pi * x / grid.length)
    if params.parity != ODD:
        raise ParameterError("sine seed has odd parity; problem asks for even")
    return np.sin(2.0 * np.pi * x / grid.length)


def minimize_constrained(params: ProblemParams, config: SolverConfig = None) -> WaveProfile:
    """Projected-gradient minimization of B_w on the constraint manifold.

    Sobolev-preconditioned residual directions (solve (-d_xx + w) d = grad)
    with Barzilai-Borwein step proposals and a non-monotone backtracking
    safeguard; the iterate is reprojected onto its parity class and rescaled
    exactly onto the constraint after every step.  Returns the stationary
    point *before* the unit-multiplier rescaling.
    """
    config = config or SolverConfig()
    grid = build_grid(params.period, config.mode_count)
    n, h = grid.size, grid.spacing
    alpha, omega, tau = params.alpha, params.omega, params.tau

    mirror = (-np.arange(n)) % n
    sign = 1.0 if params.parity == EVEN else -1.0
    sym = omega + grid.rfft_wavenumbers**2

    def parity_project(v):
        return 0.5 * (v + sign * v[mirror])

    def renormalize(v):
        mass = h * float(np.sum(np.abs(v) ** (alpha + 2.0)))
        if not np.isfinite(mass) or mass <= 0.0:
            raise DegenerateSolutionError(
                "iterate collapsed to the zero field; constraint cannot be restored"
            )
        return v * (tau / mass) ** (1.0 / (alpha + 2.0))

    u = renormalize(parity_project(_seed_values(params, config, grid)))

    def b_value(au, v):
        return 0.5 * h * float(np.dot(au, v))

    # the constant on the constraint surface is always a stationary point of
    # the even-parity problem; when the iterate drifts toward it without B
    # ever dropping below the constant's value, the constant is the limit and
    # can be taken exactly (this is the boundary/bifurcation regime where the
    # energy is quartically flat and gradient steps crawl)
    if params.parity == EVEN:
        const_level = (tau / params.period) ** (1.0 / (alpha + 2.0))
        b_const = 0.5 * omega * params.period * const_level**2
    else:
        const_level = None

    def near_constant(v, b_here):
        if const_level is None:
            return False
        if b_here < b_const - 1e-12 * (1.0 + abs(b_const)):
            return False
        return float(np.max(np.abs(v - const_level))) <= 0.05 * const_level

    window: list[float] = []
    u_prev = d_prev = None
    step = 1.0
    best_u, best_rnorm = u, np.inf

    for _ in range(config.max_outer_iterations):
        au = np.fft.irfft(np.fft.rfft(u) * sym, n=n)
        p = _power(u, alpha)
        c2 = float(np.dot(au, u) / np.dot(p, u))
        r = au - c2 * p
        rnorm = np.sqrt(h * float(np.dot(r, r)))
        anorm = np.sqrt(h * float(np.dot(au, au)))
        b_here = b_value(au, u)
        if rnorm < best_rnorm:
            best_u, best_rnorm = u, rnorm
        if rnorm <= config.gradient_tolerance * max(anorm, 1e-300):
            break
        if near_constant(u, b_here):
            u = np.full(n, const_level)
            break

        if config.preconditioner == "sobolev_h1":
            d = np.fft.irfft(np.fft.rfft(r) / sym, n=n)
        else:
            d = r
        d = parity_project(d)

        if u_prev is not None:
            du, dd = u - u_prev, d - d_prev
            denom = float(np.dot(du, dd))
            if denom > 1e-300:
                step = min(max(float(np.dot(du, du)) / denom, 1e-3), 1e7)
            else:
                step = 1.0
        u_prev, d_prev = u, d

        window.append(b_here)
        if len(window) > 10:
            window.pop(0)
        b_ref = max(window)

        s = step
        for _ in range(60):
            trial = renormalize(parity_project(u - s * d))
            au_t = np.fft.irfft(np.fft.rfft(trial) * sym, n=n)
            if b_value(au_t, trial) <= b_ref + 1e-12 * (1.0 + abs(b_ref)):
                u = trial
                break
            s *= 0.5
        else:
            # direction no longer decreases B at any safeguarded step;
            # keep a minuscule move so the BB memory stays informative
            u = renormalize(parity_project(u - 1e-9 * step * d))
    else:
        au_b = np.fft.irfft(np.fft.rfft(best_u) * sym, n=n)
        if near_constant(best_u, b_value(au_b, best_u)):
            u = np.full(n, const_level)
        else:
            raise ConvergenceError(
                f"no stationary point within {config.max_outer_iterations} iterations "
                f"(residual {best_rnorm:.3e})",
                last_iterate=best_u,
                gradient_norm=best_rnorm,
            )

    field = RealField(grid, u, params.parity)
    au = np.fft.irfft(np.fft.rfft(u) * sym, n=n)
    p = _power(u, alpha)
    c2 = float(np.dot(au, u) / np.dot(p, u))
    r = au - c2 * p
    rnorm = np.sqrt(h * float(np.dot(r, r)))
    b_final = 0.5 * h * float(np.dot(au, u))
    constraint = h * float(np.sum(np.abs(u) ** (alpha + 2.0)))
    return WaveProfile(
        params=params,
        phi=field,
        ode_residual_norm=rnorm,
        functional_value=b_final,
        constraint_value=constraint,
        detected_period=detected_fundamental_period(field),
    )


def rescale_unit_multiplier(field: RealField, c2: float, alpha: float) -> RealField:
    """Map a multiplier-c2 stationary point onto the unit-multiplier equation.

    psi = c2^(1/alpha) * u turns -u'' + w u = c2 |u|^a u into the profile
    equation for psi.
    """
    if not (np.isfinite(c2) and c2 > 0.0):
        raise InvalidMultiplierError(f"multiplier must be positive, got {c2}")
    return RealField(field.grid, c2 ** (1.0 / alpha) * field.values, field.parity)


def phase_reduce(phi1: RealField, phi2: RealField, tolerance: float = 1e-8):
    """Collapse a complex profile Phi = phi1 + i*phi2 to exp(i*theta0) * phi.

    Requires the pair to be proportional: the Wronskian-type quantity
    -phi1' phi2 + phi2' phi1 must vanish (within ``tolerance`` relative to
    the pair's scale), and then phi = sqrt(1 + r^2) * phi2 with phi1 = r*phi2
    and theta0 = arg(r + i).  Returns (phi, theta0).
    """
    if phi1.grid != phi2.grid:
        raise ParameterError("phase reduction requires a common grid")
    scale = max(phi1.max_abs, phi2.max_abs)
    if scale == 0.0:
        raise ReductionError("both components vanish identically")
    d1, d2 = first_derivative(phi1), first_derivative(phi2)
    wronskian = -d1.values * phi2.values + d2.values * phi1.values
    wr_scale = scale * max(d1.max_abs, d2.max_abs, 1.0)
    if np.max(np.abs(wronskian)) > tolerance * wr_scale:
        raise ReductionError(
            "components are not proportional: Wronskian deviation "
            f"{np.max(np.abs(wronskian)):.3e} exceeds tolerance"
        )
    n22 = inner(phi2, phi2)
    if np.sqrt(n22) <= 1e-12 * scale * np.sqrt(phi1.grid.length):
        # imaginary part is the zero profile: Phi is already real
        return RealField(phi1.grid, phi1.values, phi1.parity), 0.0
    r = inner(phi1, phi2) / n22
    residual = phi1.values - r * phi2.values
    if np.max(np.abs(residual)) > tolerance * scale:
        raise ReductionError(
            "components are not proportional: pointwise deviation "
            f"{np.max(np.abs(residual)):.3e} exceeds tolerance"
        )
    profile = RealField(phi2.grid, np.sqrt(1.0 + r * r) * phi2.values, phi2.parity)
    return profile, math.atan2(1.0, r)


# ---------------------------------------------------------------------------
# Newton polish


def _newton_basis(params: ProblemParams, grid: PeriodicGrid) -> ParityBasis:
    return ParityBasis(COSINE if params.parity == EVEN else SINE, grid)


def newton_refine(wave: WaveProfile, config: SolverConfig = None) -> WaveProfile:
    """Newton iteration on the profile equation in the wave's parity basis.

    The Jacobian -d_xx + w - (a+1)|phi|^a is assembled as a dense symmetric
    matrix on the parity basis; a profile already at tolerance is returned
    unchanged.
    """
    config = config or SolverConfig()
    params = wave.params
    grid = wave.phi.grid
    alpha, omega = params.alpha, params.omega

    res = ode_residual_field(wave.phi, alpha, omega)
    rnorm = l2_norm(res)
    if rnorm <= config.newton_tolerance:
        return wave
    if res.max_abs > NEWTON_BASIN_LIMIT:
        raise NewtonBasinError(
            f"residual max-norm {res.max_abs:.3e} exceeds the Newton basin "
            f"limit {NEWTON_BASIN_LIMIT:g}; refine the variational stage first"
        )

    basis = _newton_basis(params, grid)
    mat = basis.matrix()
    weights = grid.spacing
    freqs = basis.frequencies()
    phi = wave.phi.values.copy()

    for _ in range(config.newton_max_steps):
        res_vals = ode_residual_field(RealField(grid, phi, params.parity), alpha, omega).values
        rnorm = float(np.sqrt(weights * np.dot(res_vals, res_vals)))
        if rnorm <= config.newton_tolerance:
            break
        qpot = (alpha + 1.0) * np.abs(phi) ** alpha
        jac = np.diag(freqs**2 + omega) - mat.T @ (weights * qpot[:, None] * mat)
        jac = 0.5 * (jac + jac.T)
        eigs = np.linalg.eigvalsh(jac)
        lam_max = float(np.max(np.abs(eigs)))
        if float(np.min(np.abs(eigs))) <= 1e-12 * lam_max:
            raise SingularJacobianError(
                "Newton Jacobian is singular on the parity subspace "
                f"(relative smallest eigenvalue {np.min(np.abs(eigs)) / lam_max:.2e})"
            )
        rhs = weights * (mat.T @ res_vals)
        delta = np.linalg.solve(jac, rhs)
        correction = mat @ delta
        for damp in (1.0, 0.5, 0.25, 0.125, 0.0625):
            trial = phi - damp * correction
            tr = ode_residual_field(RealField(grid, trial, params.parity), alpha, omega)
            if l2_norm(tr) < rnorm:
                phi = trial
                break
        else:
            raise ConvergenceError(
                "Newton step failed to reduce the residual",
                last_iterate=phi,
                gradient_norm=rnorm,
            )
    else:
        res_vals = ode_residual_field(RealField(grid, phi, params.parity), alpha, omega).values
        rnorm = float(np.sqrt(weights * np.dot(res_vals, res_vals)))
        if rnorm > config.newton_tolerance:
            raise ConvergenceError(
                f"Newton did not reach {config.newton_tolerance:g} in "
                f"{config.newton_max_steps} steps (residual {rnorm:.3e})",
                last_iterate=phi,
                gradient_norm=rnorm,
            )

    field = RealField(grid, phi, params.parity)
    return WaveProfile(
        params=params,
        phi=field,
        ode_residual_norm=ode_residual(field, alpha, omega),
        functional_value=functional_B(field, omega),
        constraint_value=integrate(
            RealField(grid, np.abs(phi) ** (alpha + 2.0), EVEN if params.parity in (EVEN, ODD) else NONE)
        ),
        detected_period=detected_fundamental_period(field),
    )


# ---------------------------------------------------------------------------
# orchestration


def _accept(wave: WaveProfile, tolerance: float) -> WaveProfile:
    phi = wave.phi
    if wave.ode_residual_norm > tolerance:
        raise WaveAcceptanceError(
            f"profile residual {wave.ode_residual_norm:.3e} above tolerance {tolerance:g}"
        )
    if wave.params.parity == EVEN:
        if float(np.min(phi.values)) <= 0.0:
            raise WaveAcceptanceError(
                "even profile is not strictly positive "
                f"(min {float(np.min(phi.values)):.3e}); the positivity-based "
                "spectral analysis does not apply"
            )
    else:
        if abs(phi.values[0]) > 1e-8 * max(phi.max_abs, 1e-300):
            raise WaveAcceptanceError("odd profile does not vanish at x = 0")
        if not (np.min(phi.values) < 0.0 < np.max(phi.values)) and phi.max_abs > 0:
            raise WaveAcceptanceError("odd profile never changes sign")
    return wave


def solve_wave(params: ProblemParams, config: SolverConfig = None) -> WaveProfile:
    """Full pipeline: constrained minimization, unit rescaling, Newton polish.

    The returned profile solves -phi'' + w phi - |phi|^a phi = 0 with
    residual at most ``config.newton_tolerance``; parity-specific structure
    (positivity for even waves, sign change and a root at the origin for odd
    waves) is asserted before the profile is released.
    """
    config = config or SolverConfig()
    stationary = minimize_constrained(params, config)
    psi = rescale_unit_multiplier(stationary.phi, stationary.multiplier, params.alpha)
    unpolished = WaveProfile(
        params=params,
        phi=psi,
        ode_residual_norm=ode_residual(psi, params.alpha, params.omega),
        functional_value=functional_B(psi, params.omega),
        constraint_value=integrate(
            RealField(psi.grid, np.abs(psi.values) ** (params.alpha + 2.0), EVEN)
        ),
        detected_period=detected_fundamental_period(psi),
    )
    try:
        polished = newton_refine(unpolished, config)
    except SingularJacobianError:
        # degenerate linearization at the solution (bifurcation-point
        # parameters); keep the variational answer if it already qualifies
        if unpolished.ode_residual_norm <= config.newton_tolerance:
            polished = unpolished
        else:
            raise
    return _accept(polished, config.newton_tolerance)


def constant_wave(alpha: float, omega: float, period: float, size: int) -> WaveProfile:
    """The exact constant solution phi = w^(1/a) as an accepted profile."""
    grid = build_grid(period, size)
    level = omega ** (1.0 / alpha)
    field = RealField(grid, np.full(grid.size, level), EVEN)
    tau = period * level ** (alpha + 2.0)
    params = ProblemParams(alpha=alpha, omega=omega, period=period, tau=tau, parity=EVEN)
    return WaveProfile(
        params=params,
        phi=field,
        ode_residual_norm=ode_residual(field, alpha, omega),
        functional_value=functional_B(field, omega),
        constraint_value=tau,
        detected_period=None,
    )


def wave_at_resolution(wave: WaveProfile, size: int) -> WaveProfile:
    """Trigonometric reinterpolation of an accepted wave onto N = ``size``."""
    phi = resample(wave.phi, size)
    return WaveProfile(
        params=wave.params,
        phi=phi,
        ode_residual_norm=ode_residual(phi, wave.params.alpha, wave.params.omega),
        functional_value=functional_B(phi, wave.params.omega),
        constraint_value=integrate(
            RealField(phi.grid, np.abs(phi.values) ** (wave.params.alpha + 2.0), EVEN)
        ),
        detected_period=wave.detected_period,
    )


def tau_for_amplitude(
    alpha: float,
    omega: float,
    period: float,
    parity: str,
    amplitude: float,
    config: SolverConfig = None,
    tolerance: float = 1e-4,
) -> float:
    """Bisect on tau until the constrained minimizer has max|u| = amplitude.

    The target applies to the minimizer *before* the unit-multiplier
    rescaling (the rescaled profile is tau-independent along one stationary
    branch).  Warm starts reuse the previous minimizer.
    """
    if not (np.isfinite(amplitude) and amplitude > 0.0):
        raise ParameterError(f"target amplitude must be positive, got {amplitude}")
    config = config or SolverConfig()

    def measure(tau, seed=None):
        cfg = config
        if seed is not None:
            cfg = replace(config, initial_guess="user_supplied", user_guess=seed)
        wave = minimize_constrained(
            ProblemParams(alpha=alpha, omega=omega, period=period, tau=tau, parity=parity),
            cfg,
        )
        return wave.phi.max_abs, wave.phi.values

    tau0 = period * amplitude ** (alpha + 2.0)
    amp0, u0 = measure(tau0)
    # one-parameter scaling of the branch gives a sharp initial guess
    tau_mid = tau0 * (amplitude / amp0) ** (alpha + 2.0)
    lo, hi = 0.5 * tau_mid, 2.0 * tau_mid
    amp_lo, u_lo = measure(lo, seed=u0 * (lo / tau0) ** (1.0 / (alpha + 2.0)))
    amp_hi, u_hi = measure(hi, seed=u0 * (hi / tau0) ** (1.0 / (alpha + 2.0)))
    for _ in range(20):
        if amp_lo <= amplitude <= amp_hi:
            break
        if amp_lo > amplitude:
            lo *= 0.5
            amp_lo, u_lo = measure(lo, seed=u_lo * 0.5 ** (1.0 / (alpha + 2.0)))
        else:
            hi *= 2.0
            amp_hi, u_hi = measure(hi, seed=u_hi * 2.0 ** (1.0 / (alpha + 2.0)))
    else:
        raise ConvergenceError(
            f"could not bracket amplitude {amplitude} by varying tau",
            gradient_norm=None,
        )
    seed = u_lo
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        amp_mid, seed = measure(mid, seed=seed * (mid / lo) ** (1.0 / (alpha + 2.0)))
        if abs(amp_mid - amplitude) <= tolerance:
            return mid
        if amp_mid < amplitude:
            lo, amp_lo = mid, amp_mid
        else:
            hi, amp_hi = mid, amp_mid
    raise ConvergenceError(
        f"tau bisection did not reach amplitude tolerance {tolerance:g}",
        gradient_norm=None,
    )
