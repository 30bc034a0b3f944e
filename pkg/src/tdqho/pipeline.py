"""End-to-end propagation of moments for the time-dependent quadratic model.

The chain: solve the displacement pair (beta_x, beta_p) that tracks the
drives, accumulate the scalar bias ell(t), solve the Ermakov equation for
the scale rho(t) of the effective oscillator while co-integrating the phase
quadratures, assemble the linear map (A, B, D, E) relating centered means
at time t to those at 0, then push first and second moments through that
map. The map is built as a product of five 2x2 conjugation matrices
(scaling, basis rotation, shear-scale, phase rotation, inverse basis
rotation), which keeps AE - BD = 1 to machine precision by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidityError
from .integrators import OdeSystem, integrate_adaptive, with_quadrature
from .model import (MomentState, effective_m5_omega5, gamma_squeeze, kappa,
                    m5_log_derivative, validate)
from .staticdiag import StaticParams, static_translation

PIPELINE_SAMPLES = 2000
PIPELINE_REL_TOL = 1e-12
PIPELINE_ABS_TOL = 1e-14


def _static_at(params, t):
    return StaticParams(
        m=params.m.value(t), omega=params.omega.value(t),
        alpha_x=params.alpha_x.value(t), alpha_p=params.alpha_p.value(t),
        alpha_xp=params.alpha_xp.value(t), alpha_0=params.alpha_0.value(t),
        hbar=params.hbar)


def default_grid(params, n_samples=PIPELINE_SAMPLES):
    return np.linspace(0.0, params.horizon, n_samples)


# -- displacement pair -----------------------------------------------------


@dataclass(frozen=True)
class BetaSolution:
    """Sampled displacement pair with its dense interpolant.

    beta_p is recovered algebraically from (beta_x, beta_x_dot), so the
    defining constraint beta_p = m(-beta_x_dot + 2 a_xp beta_x + a_p)
    holds exactly on the grid.
    """

    times: np.ndarray
    beta_x: np.ndarray
    beta_x_dot: np.ndarray
    beta_p: np.ndarray
    _params: object
    _dense: object

    def at(self, t):
        """(beta_x, beta_x_dot, beta_p) at arbitrary t, from dense output."""
        y = self._dense(t)
        bx, bxd = y[0], y[1]
        p = self._params
        bp = p.m.value(t) * (-bxd + 2.0 * p.alpha_xp.value(t) * bx + p.alpha_p.value(t))
        return bx, bxd, bp

    def constraint_residual(self):
        """|beta_p - m(-beta_x_dot + 2 a_xp beta_x + a_p)| on the grid."""
        p = self._params
        ts = self.times
        predicted = p.m.value(ts) * (-self.beta_x_dot
                                     + 2.0 * p.alpha_xp.value(ts) * self.beta_x
                                     + p.alpha_p.value(ts))
        return np.abs(self.beta_p - predicted)


def solve_beta(params, grid=None, rel_tol=PIPELINE_REL_TOL, abs_tol=PIPELINE_ABS_TOL):
    """Integrate the second-order displacement equation on [0, T].

    Initial conditions come from the translation of the frozen t = 0
    Hamiltonian; a SingularityError propagates if omega(0)^2 = 4 a_xp(0)^2.
    """
    if grid is None:
        grid = default_grid(params)
    bx0, bp0 = static_translation(_static_at(params, 0.0))
    m0 = params.m.value(0.0)
    bxd0 = 2.0 * params.alpha_xp.value(0.0) * bx0 + params.alpha_p.value(0.0) - bp0 / m0

    def rhs(t, y):
        m = params.m.value(t)
        w = params.omega.value(t)
        axp = params.alpha_xp.value(t)
        ap = params.alpha_p.value(t)
        mlog = params.m.derivative(t) / m
        forcing = params.alpha_p.derivative(t) - params.alpha_x.value(t) / m \
            + 2.0 * ap * axp + ap * mlog
        coeff = 2.0 * params.alpha_xp.derivative(t) - w * w + 4.0 * axp * axp \
            + 2.0 * axp * mlog
        return np.array([y[1], -mlog * y[1] + coeff * y[0] + forcing])

    system = OdeSystem(n=2, f=rhs, t_end=params.horizon)
    sol = integrate_adaptive(system, [bx0, bxd0], rel_tol, abs_tol, sample_times=grid)
    bx, bxd = sol.states[0], sol.states[1]
    ts = sol.times
    bp = params.m.value(ts) * (-bxd + 2.0 * params.alpha_xp.value(ts) * bx
                               + params.alpha_p.value(ts))
    return BetaSolution(times=ts, beta_x=bx, beta_x_dot=bxd, beta_p=bp,
                        _params=params, _dense=sol.dense)


def ell(params, beta, t):
    """Scalar energy bias accumulated by the displacement at time t."""
    bx, _, bp = beta.at(t)
    m = params.m.value(t)
    w = params.omega.value(t)
    return bp ** 2 / (2.0 * m) + 0.5 * m * w * w * bx ** 2 \
        + params.alpha_x.value(t) * bx - params.alpha_p.value(t) * bp \
        - 2.0 * params.alpha_xp.value(t) * bx * bp


# -- Ermakov scale and phase quadratures -----------------------------------


@dataclass(frozen=True)
class ErmakovSolution:
    """Sampled Ermakov scale rho with the three running phase integrals:
    Phi = int Omega, X = int a_xp, Lambda = int (a_0 + ell)."""

    times: np.ndarray
    rho: np.ndarray
    rho_dot: np.ndarray
    Phi: np.ndarray
    X: np.ndarray
    Lambda: np.ndarray
    _dense: object

    def at(self, t):
        y = self._dense(t)
        return y[0], y[1], y[2], y[3], y[4]

    @property
    def rho0(self):
        return self.rho[0]


def solve_ermakov(params, beta, grid=None,
                  rel_tol=PIPELINE_REL_TOL, abs_tol=PIPELINE_ABS_TOL):
    """Integrate the Ermakov equation for the effective oscillator scale.

    State is (rho, rho_dot) plus quadrature channels (Phi, X, Lambda);
    Lambda needs ell(t), hence the displacement solution comes first.
    """
    if grid is None:
        grid = default_grid(params)
    m5_grid, w5sq_grid = effective_m5_omega5(params, grid)
    if np.any(w5sq_grid <= 0.0):
        i = int(np.argmax(w5sq_grid <= 0.0))
        raise ValidityError("effective squared frequency not positive",
                            t=float(grid[i]), constraint="omega^2 - kappa^2 > 0")
    m5_0 = float(np.atleast_1d(m5_grid)[0])
    w5_0 = math.sqrt(float(np.atleast_1d(w5sq_grid)[0]))
    rho0 = 1.0 / math.sqrt(m5_0 * w5_0)

    def rhs(t, y):
        rho, rho_dot = y
        if rho <= 0.0:
            raise ValidityError("Ermakov scale must stay positive", t=t,
                                constraint="rho > 0")
        m5, w5sq = effective_m5_omega5(params, t)
        acc = -m5_log_derivative(params, t) * rho_dot - w5sq * rho \
            + 1.0 / (m5 * m5 * rho ** 3)
        return np.array([rho_dot, acc])

    def g_phi(t, y):
        m5, _ = effective_m5_omega5(params, t)
        return 1.0 / (m5 * y[0] ** 2)

    def g_x(t, y):
        return params.alpha_xp.value(t)

    def g_lambda(t, y):
        return params.alpha_0.value(t) + ell(params, beta, t)

    base = OdeSystem(n=2, f=rhs, t_end=params.horizon)
    system = with_quadrature(base, [g_phi, g_x, g_lambda])
    sol = integrate_adaptive(system, [rho0, 0.0, 0.0, 0.0, 0.0],
                             rel_tol, abs_tol, sample_times=grid)
    rho = sol.states[0]
    if np.any(rho <= 0.0):
        i = int(np.argmax(rho <= 0.0))
        raise ValidityError("Ermakov scale must stay positive",
                            t=float(sol.times[i]), constraint="rho > 0")
    return ErmakovSolution(times=sol.times, rho=rho, rho_dot=sol.states[1],
                           Phi=sol.states[2], X=sol.states[3], Lambda=sol.states[4],
                           _dense=sol.dense)


def big_omega(params, ermakov, t):
    """Instantaneous effective frequency (omega + kappa)/(m(0) w(0) rho^2)."""
    rho = ermakov.at(t)[0]
    eta0 = params.m.value(0.0) * params.omega.value(0.0)
    return (params.omega.value(t) + kappa(params, t)) / (eta0 * rho ** 2)


# -- propagator coefficients ------------------------------------------------


@dataclass(frozen=True)
class PropagatorCoefficients:
    """Linear map of centered means and the scalars entering it.

    (A, B; D, E) maps (x - beta_x(0), p + beta_p(0)) at time 0 to the
    centered pair at time t; determinant is 1.
    """

    t: object
    A: object
    B: object
    D: object
    E: object
    xi: object
    eps: object
    eta: float
    S: object
    C: object
    beta_x_t: object
    beta_p_t: object
    beta_x_0: float
    beta_p_0: float


def _mat_mul(p, q):
    # 2x2 blocks with array entries
    return [[p[0][0] * q[0][0] + p[0][1] * q[1][0], p[0][0] * q[0][1] + p[0][1] * q[1][1]],
            [p[1][0] * q[0][0] + p[1][1] * q[1][0], p[1][0] * q[0][1] + p[1][1] * q[1][1]]]


def _rot(theta, metric):
    c, s = np.cos(theta), np.sin(theta)
    return [[c, s / metric], [-metric * s, c]]


def coefficients(params, beta, ermakov, t):
    """Assemble the propagator coefficients at time(s) t.

    Product of scaling by gamma, a pi/4 rotation in the metric
    eta = m(0) w(0), the Ermakov shear-scale, the rotation by the
    accumulated phase Phi, and the inverse pi/4 rotation.
    """
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    rho, rho_dot, phi, _, _ = ermakov.at(ts)
    m5, _ = effective_m5_omega5(params, ts)
    g = gamma_squeeze(params, ts)
    eta = params.m.value(0.0) * params.omega.value(0.0)
    rho0 = ermakov.rho0
    eps = m5 * rho_dot * rho
    ones = np.ones_like(ts)

    a_d = [[g, 0.0 * ones], [0.0 * ones, 1.0 / g]]
    a_e = _rot(math.pi / 4.0, eta)
    a_f = [[rho / rho0, 0.0 * ones], [m5 * rho_dot / rho0, rho0 / rho]]
    a_7 = _rot(phi, 1.0 / rho0 ** 2)
    a_e_inv = _rot(-math.pi / 4.0, eta)

    m = _mat_mul(a_d, _mat_mul(a_e, _mat_mul(a_f, _mat_mul(a_7, a_e_inv))))

    bx_t, _, bp_t = beta.at(ts)
    bx0, _, bp0 = beta.at(0.0)

    def out(v):
        v = np.asarray(v, dtype=float) + 0.0 * ones
        return float(v[0]) if scalar else v

    return PropagatorCoefficients(
        t=out(ts), A=out(m[0][0]), B=out(m[0][1]),
        D=out(m[1][0]), E=out(m[1][1]),
        xi=out((rho / rho0) * g), eps=out(eps), eta=eta,
        S=out(np.sin(phi)), C=out(np.cos(phi)),
        beta_x_t=out(bx_t), beta_p_t=out(bp_t),
        beta_x_0=float(bx0), beta_p_0=float(bp0))


# -- moments ----------------------------------------------------------------


@dataclass(frozen=True)
class MomentTrajectory:
    """Moment arrays on a common time grid."""

    times: np.ndarray
    mean_x: np.ndarray
    mean_p: np.ndarray
    var_x: np.ndarray
    var_p: np.ndarray
    cov_xp: np.ndarray

    def state(self, i):
        return MomentState(float(self.times[i]), float(self.mean_x[i]),
                           float(self.mean_p[i]), float(self.var_x[i]),
                           float(self.var_p[i]), float(self.cov_xp[i]))

    def uncertainty_product(self):
        return self.var_x * self.var_p - self.cov_xp ** 2


def propagate_moments(initial, coeffs):
    """Push first and second moments through the linear map.

    Returns a MomentState for scalar coefficient sets, else a
    MomentTrajectory.
    """
    a, b, d, e = coeffs.A, coeffs.B, coeffs.D, coeffs.E
    dx0 = initial.mean_x - coeffs.beta_x_0
    dp0 = initial.mean_p + coeffs.beta_p_0
    mean_x = a * dx0 + b * dp0 + coeffs.beta_x_t
    mean_p = d * dx0 + e * dp0 - coeffs.beta_p_t
    vx, vp, cv = initial.var_x, initial.var_p, initial.cov_xp
    var_x = a * a * vx + b * b * vp + 2.0 * a * b * cv
    var_p = d * d * vx + e * e * vp + 2.0 * d * e * cv
    cov = a * d * vx + b * e * vp + (a * e + b * d) * cv
    if np.ndim(coeffs.t) == 0:
        return MomentState(float(coeffs.t), float(mean_x), float(mean_p),
                           float(var_x), float(var_p), float(cov))
    return MomentTrajectory(times=coeffs.t, mean_x=mean_x, mean_p=mean_p,
                            var_x=var_x, var_p=var_p, cov_xp=cov)


def global_phase(ermakov, t, hbar=1.0):
    """Accumulated scalar phase -Lambda(t)/hbar."""
    lam = ermakov.at(t)[4]
    return -lam / hbar


def gaussian_density(state, x_grid):
    """Normal position density of a Gaussian state on x_grid."""
    if not (state.var_x > 0.0):
        raise ValidityError("position variance must be positive for a density",
                            t=state.t, constraint="var_x > 0")
    x = np.asarray(x_grid, dtype=float)
    return np.exp(-((x - state.mean_x) ** 2) / (2.0 * state.var_x)) \
        / math.sqrt(2.0 * math.pi * state.var_x)


# -- one-call pipeline -------------------------------------------------------


@dataclass(frozen=True)
class PipelineSolution:
    """Everything one run produces, sampled on a shared grid."""

    params: object
    grid: np.ndarray
    beta: BetaSolution
    ermakov: ErmakovSolution
    coeffs: PropagatorCoefficients

    def coefficients_at(self, t):
        return coefficients(self.params, self.beta, self.ermakov, t)

    def moments(self, initial):
        return propagate_moments(initial, self.coeffs)

    def moments_at(self, initial, t):
        return propagate_moments(initial, self.coefficients_at(t))

    def global_phase(self, t=None):
        ts = self.grid if t is None else t
        return global_phase(self.ermakov, ts, self.params.hbar)


def solve(params, n_samples=PIPELINE_SAMPLES,
          rel_tol=PIPELINE_REL_TOL, abs_tol=PIPELINE_ABS_TOL):
    """Run the full chain on a uniform grid and return a PipelineSolution."""
    validate(params).raise_if_invalid()
    grid = default_grid(params, n_samples)
    beta = solve_beta(params, grid, rel_tol, abs_tol)
    ermakov = solve_ermakov(params, beta, grid, rel_tol, abs_tol)
    coeffs = coefficients(params, beta, ermakov, grid)
    return PipelineSolution(params=params, grid=grid, beta=beta,
                            ermakov=ermakov, coeffs=coeffs)


# -- independent residual checks --------------------------------------------


def ermakov_residual(params, ermakov, n_points=257, h=None):
    """Max Ermakov-equation residual, with the second derivative taken by a
    five-point central difference of the integrated rho_dot channel."""
    T = float(ermakov.times[-1])
    if h is None:
        h = T / 4096.0
    tt = np.linspace(2.0 * h, T - 2.0 * h, n_points)
    rho_dd = (-ermakov.at(tt + 2 * h)[1] + 8.0 * ermakov.at(tt + h)[1]
              - 8.0 * ermakov.at(tt - h)[1] + ermakov.at(tt - 2 * h)[1]) / (12.0 * h)
    rho, rho_dot = ermakov.at(tt)[0], ermakov.at(tt)[1]
    m5, w5sq = effective_m5_omega5(params, tt)
    res = rho_dd + m5_log_derivative(params, tt) * rho_dot + w5sq * rho \
        - 1.0 / (m5 * m5 * rho ** 3)
    return float(np.abs(res).max())


def beta_ode_residual(params, beta, n_points=257, h=None):
    """Max second-order displacement-equation residual via a five-point
    central difference of the integrated beta_x_dot channel."""
    T = float(beta.times[-1])
    if h is None:
        h = T / 4096.0
    tt = np.linspace(2.0 * h, T - 2.0 * h, n_points)
    bxdd = (-beta.at(tt + 2 * h)[1] + 8.0 * beta.at(tt + h)[1]
            - 8.0 * beta.at(tt - h)[1] + beta.at(tt - 2 * h)[1]) / (12.0 * h)
    bx, bxd, _ = beta.at(tt)
    m = params.m.value(tt)
    w = params.omega.value(tt)
    axp = params.alpha_xp.value(tt)
    ap = params.alpha_p.value(tt)
    mlog = params.m.derivative(tt) / m
    coeff = 2.0 * params.alpha_xp.derivative(tt) - w * w + 4.0 * axp * axp \
        + 2.0 * axp * mlog
    forcing = params.alpha_p.derivative(tt) - params.alpha_x.value(tt) / m \
        + 2.0 * ap * axp + ap * mlog
    res = bxdd + mlog * bxd - coeff * bx - forcing
    return float(np.abs(res).max())
