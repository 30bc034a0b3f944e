"""Model definition for the general quadratic oscillator.

The Hamiltonian is

    H(t) = p^2 / (2 m(t)) + m(t) w(t)^2 x^2 / 2
         + a_x(t) x + a_p(t) p + a_xp(t) {x, p} + a_0(t)

with every coefficient a ``TimeFunction``. This module holds the parameter
container, first/second moments of a state, the auxiliary frequency-shift
kappa(t) and the effective single-mode quantities derived from it, plus a
grid-based validity scan.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DomainError, ValidityError
from .timefunc import Constant, TimeFunction

DEFAULT_VALIDATION_GRID = 4096
UNCERTAINTY_SLACK = 1e-9

_COEFF_KEYS = ("m", "omega", "alpha_x", "alpha_p", "alpha_xp", "alpha_0")
_ZERO = Constant(0.0)


@dataclass(frozen=True)
class QuadraticParams:
    """Coefficients of the quadratic Hamiltonian on the horizon [0, T]."""

    m: TimeFunction
    omega: TimeFunction
    alpha_x: TimeFunction = _ZERO
    alpha_p: TimeFunction = _ZERO
    alpha_xp: TimeFunction = _ZERO
    alpha_0: TimeFunction = _ZERO
    hbar: float = 1.0
    horizon: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0.0):
            raise DomainError(f"hbar must be positive, got {self.hbar}")
        if not (self.horizon > 0.0):
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        for key in _COEFF_KEYS:
            fn = getattr(self, key)
            if not isinstance(fn, TimeFunction):
                raise ConfigError(f"{key}: expected a TimeFunction, got {type(fn).__name__}")
            fn.check_domain(self.horizon)

    # -- config ----------------------------------------------------------

    @staticmethod
    def from_dict(obj):
        if not isinstance(obj, dict):
            raise ConfigError("config root must be an object")
        known = set(_COEFF_KEYS) | {"hbar", "horizon"}
        for key in obj:
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
        for key in ("m", "omega", "horizon"):
            if key not in obj:
                raise ConfigError(f"missing required config key {key!r}")
        fns = {}
        for key in _COEFF_KEYS:
            if key in obj:
                fns[key] = TimeFunction.from_dict(obj[key], key=key)
        return QuadraticParams(hbar=float(obj.get("hbar", 1.0)),
                               horizon=float(obj["horizon"]), **fns)

    @staticmethod
    def from_json(text):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return QuadraticParams.from_dict(obj)

    def to_dict(self):
        out = {"hbar": self.hbar, "horizon": self.horizon}
        for key in _COEFF_KEYS:
            out[key] = getattr(self, key).to_dict()
        return out

    def with_horizon(self, horizon):
        return replace(self, horizon=float(horizon))

    def is_structurally_static(self):
        return all(getattr(self, k).is_effectively_constant() for k in _COEFF_KEYS)


@dataclass(frozen=True)
class MomentState:
    """First and second central moments of a state at time t."""

    t: float
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    cov_xp: float

    def uncertainty_product(self):
        return self.var_x * self.var_p - self.cov_xp ** 2

    def check(self, hbar=1.0):
        """Raise ValidityError unless the moments describe a physical state."""
        if not all(math.isfinite(v) for v in
                   (self.mean_x, self.mean_p, self.var_x, self.var_p, self.cov_xp)):
            raise ValidityError("non-finite moment", t=self.t)
        if self.var_x <= 0.0 or self.var_p <= 0.0:
            raise ValidityError("variances must be positive", t=self.t,
                                constraint="var_x > 0, var_p > 0")
        if self.uncertainty_product() < hbar ** 2 / 4.0 - UNCERTAINTY_SLACK:
            raise ValidityError(
                f"uncertainty product {self.uncertainty_product():.6e} below bound "
                f"{hbar ** 2 / 4.0:.6e}", t=self.t,
                constraint="var_x*var_p - cov_xp^2 >= hbar^2/4")
        return self


def ground_moments(m0, omega0, hbar=1.0, t=0.0):
    """Moments of the instantaneous ground state of the alpha-free oscillator."""
    return MomentState(t, 0.0, 0.0, hbar / (2.0 * m0 * omega0), hbar * m0 * omega0 / 2.0, 0.0)


def coherent_moments(alpha, m0, omega0, hbar=1.0, t=0.0):
    """Moments of a coherent state |alpha>; same variances as the ground state."""
    alpha = complex(alpha)
    mean_x = math.sqrt(2.0 * hbar / (m0 * omega0)) * alpha.real
    mean_p = math.sqrt(2.0 * hbar * m0 * omega0) * alpha.imag
    return MomentState(t, mean_x, mean_p,
                       hbar / (2.0 * m0 * omega0), hbar * m0 * omega0 / 2.0, 0.0)


# -- auxiliary quantities --------------------------------------------------


def kappa(params, t):
    """Frequency shift kappa = (m'/m + w'/w)/2 + 2*a_xp."""
    m = params.m.value(t)
    w = params.omega.value(t)
    return 0.5 * (params.m.derivative(t) / m + params.omega.derivative(t) / w) \
        + 2.0 * params.alpha_xp.value(t)


def kappa_dot(params, t):
    """Time derivative of kappa, using analytic second derivatives."""
    m = params.m.value(t)
    w = params.omega.value(t)
    md, wd = params.m.derivative(t), params.omega.derivative(t)
    mdd, wdd = params.m.second_derivative(t), params.omega.second_derivative(t)
    return 0.5 * (mdd / m - (md / m) ** 2 + wdd / w - (wd / w) ** 2) \
        + 2.0 * params.alpha_xp.derivative(t)


def effective_m5_omega5(params, t):
    """Effective mass and squared frequency after the time-dependent part of
    the diagonalization chain: m5 = m(0) w(0) / (w + kappa), w5^2 = w^2 - kappa^2.

    Returns (m5, omega5_sq). Raises ValidityError where w + kappa <= 0.
    """
    w = params.omega.value(t)
    k = kappa(params, t)
    denom = w + k
    bad = denom <= 0.0
    if np.any(bad):
        t_bad = float(np.atleast_1d(np.asarray(t, dtype=float))[np.argmax(np.atleast_1d(bad))])
        raise ValidityError("w + kappa must stay positive", t=t_bad, constraint="w + kappa > 0")
    eta0 = params.m.value(0.0) * params.omega.value(0.0)
    return eta0 / denom, w * w - k * k


def m5_log_derivative(params, t):
    """d/dt ln m5 = -(w' + kappa') / (w + kappa)."""
    w = params.omega.value(t)
    k = kappa(params, t)
    return -(params.omega.derivative(t) + kappa_dot(params, t)) / (w + k)


def gamma_squeeze(params, t):
    """Scaling gamma(t) = sqrt(m(0) w(0) / (m(t) w(t)))."""
    eta0 = params.m.value(0.0) * params.omega.value(0.0)
    return np.sqrt(eta0 / (params.m.value(t) * params.omega.value(t)))


# -- validity scan ---------------------------------------------------------


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    failures: tuple = field(default_factory=tuple)  # (constraint, t, value)
    grid_points: int = DEFAULT_VALIDATION_GRID

    def raise_if_invalid(self):
        if not self.ok:
            constraint, t, value = self.failures[0]
            raise ValidityError(f"constraint violated: {constraint} (value {value:.6e})",
                                t=t, constraint=constraint)
        return self


def validate(params, grid_points=DEFAULT_VALIDATION_GRID):
    """Scan a uniform grid on [0, T] for the applicability conditions of the
    diagonalization chain. Deterministic for fixed inputs.

    Checks m > 0, w > 0, w + kappa > 0 and w^2 - kappa^2 > 0 everywhere; if
    all coefficients are structurally constant, also w^2 > 4 a_xp^2.
    """
    ts = np.linspace(0.0, params.horizon, grid_points)
    m = np.asarray(params.m.value(ts), dtype=float)
    w = np.asarray(params.omega.value(ts), dtype=float)
    failures = []

    def scan(name, arr):
        bad = ~(arr > 0.0)
        if np.any(bad):
            i = int(np.argmax(bad))
            failures.append((name, float(ts[i]), float(arr[i])))

    scan("m > 0", m)
    scan("omega > 0", w)
    if not failures:
        k = 0.5 * (np.asarray(params.m.derivative(ts), dtype=float) / m
                   + np.asarray(params.omega.derivative(ts), dtype=float) / w) \
            + 2.0 * np.asarray(params.alpha_xp.value(ts), dtype=float)
        scan("omega + kappa > 0", w + k)
        scan("omega^2 - kappa^2 > 0", w * w - k * k)
    if params.is_structurally_static():
        axp = params.alpha_xp.value(0.0)
        w0 = params.omega.value(0.0)
        if not (w0 * w0 > 4.0 * axp * axp):
            failures.append(("omega^2 > 4 alpha_xp^2", 0.0, w0 * w0 - 4.0 * axp * axp))
    return ValidityReport(ok=not failures, failures=tuple(failures), grid_points=grid_points)
