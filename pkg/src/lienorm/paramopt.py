"""Parameter optimization for the convergence certificate.

Two objectives: the basic one fixes r = 1/2 and maximizes the rational
function F(lambda, mu) = e*t_inf; the equalized one first balances the
two certificate inequalities, which pins r as a function of (lambda, mu),
and maximizes the resulting e*t_inf.  Both optimizers are deterministic:
a coarse grid scan, a Nelder-Mead refinement, then Newton steps on the
complex-step gradient (the simplex alone cannot resolve the flat maximum
to the accuracy the cubic-residual check needs).

The certified domain radius is compared against the true inversion
radius R(n, beta); their ratio Q is minimized per n to reproduce the
reference table.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

E = math.e


@dataclass(frozen=True)
class OptResult:
    lambda_opt: float
    mu_opt: float
    r_opt: float | None
    objective: float  # e * t_inf
    t_inf: float
    iterations: int
    grad_norm: float

    def to_dict(self) -> dict:
        d = {
            "lambda": self.lambda_opt,
            "mu": self.mu_opt,
            "e_t_inf": self.objective,
            "t_inf": self.t_inf,
            "iterations": self.iterations,
            "grad_norm": self.grad_norm,
        }
        if self.r_opt is not None:
            d["r"] = self.r_opt
        return d


@dataclass(frozen=True)
class QRow:
    n: int
    lam: float
    mu: float
    Q: float
    true_radius: float
    certified_t_inf: float

    def to_dict(self) -> dict:
        return {
            "n": self.n, "lambda": self.lam, "mu": self.mu, "Q": self.Q,
            "true_radius": self.true_radius, "t_inf": self.certified_t_inf,
        }


def _check_triangle(lam, mu):
    if not (0 < lam.real < mu.real < 1):
        raise ValueError("need 0 < lambda < mu < 1, got (%s, %s)" % (lam, mu))


def F_basic(lam, mu):
    """(1 + lam - lam/mu) lam^2 (1-mu)^2 / (2 mu) * (mu-lam)/(1-lam).

    Equals e*t_inf for the r = 1/2 certificate chain at n = 3, beta = 1.
    Accepts complex arguments so gradients can be taken by complex step.
    """
    _check_triangle(lam, mu)
    rho = 1 + lam - lam / mu
    return rho * lam**2 * (1 - mu) ** 2 / (2 * mu) * (mu - lam) / (1 - lam)


def solve_r(nu):
    """Root in (0, 1) of r/(1-r)^2 = nu: r = (1 + 2 nu - sqrt(1+4 nu))/(2 nu)."""
    if isinstance(nu, complex):
        return (1 + 2 * nu - cmath.sqrt(1 + 4 * nu)) / (2 * nu)
    if nu <= 0:
        raise ValueError("need nu > 0")
    return (1 + 2 * nu - math.sqrt(1 + 4 * nu)) / (2 * nu)


def equalized_objective(lam, mu):
    """r(lam,mu) (1-mu)/mu^2 * (mu-lam)/(1-lam) with the equal-bound r.

    The balancing condition is r/(1-r)^2 = 2 rho lam^2 mu (1-mu); the
    value is again e*t_inf.
    """
    _check_triangle(lam, mu)
    rho = 1 + lam - lam / mu
    nu = 2 * rho * lam**2 * mu * (1 - mu)
    r = solve_r(nu)
    return r * (1 - mu) / mu**2 * (mu - lam) / (1 - lam)


def true_radius(n: int, beta) -> float:
    """(1/(n beta))^(1/(n-2)) sqrt(1 - 2/n): the inversion radius of
    z*sqrt(1 + 2 beta z^(n-2))."""
    if n < 3:
        raise ValueError("need n >= 3")
    if beta <= 0:
        raise ValueError("need beta > 0")
    return (1.0 / (n * beta)) ** (1.0 / (n - 2)) * math.sqrt(1.0 - 2.0 / n)


def certified_t_inf(n: int, lam, mu, beta=1.0):
    """(r(1-mu)/(e beta mu))^(1/(n-2)) * (mu-lam)/(mu(1-lam)) with the
    equal-bound r."""
    _check_triangle(lam, mu)
    rho = 1 + lam - lam / mu
    nu = 2 * rho * lam**2 * mu * (1 - mu)
    r = solve_r(nu)
    base = r * (1 - mu) / (E * beta * mu)
    return base ** (1.0 / (n - 2)) * (mu - lam) / (mu * (1 - lam))


def q_value(n: int, lam, mu):
    """Q = true_radius / certified_t_inf; independent of beta."""
    tinf = certified_t_inf(n, lam, mu, 1.0)
    if not isinstance(tinf, complex) and tinf <= 0:
        return math.inf
    return true_radius(n, 1.0) / tinf


# -- deterministic maximization ----------------------------------------


def _complex_step_grad(f, lam, mu, h=1e-20):
    gl = f(complex(lam, h), mu).imag / h
    gm = f(lam, complex(mu, h)).imag / h
    return np.array([gl, gm])


def _newton_polish(f, x0, tol=1e-13, iters=60):
    """Newton on the complex-step gradient; Hessian by central differences
    of the gradient."""
    x = np.array(x0, dtype=float)
    h = 1e-6
    last_g = _complex_step_grad(f, *x)
    for it in range(iters):
        g = _complex_step_grad(f, *x)
        last_g = g
        if np.linalg.norm(g) < tol:
            break
        hxx = (_complex_step_grad(f, x[0] + h, x[1])
               - _complex_step_grad(f, x[0] - h, x[1])) / (2 * h)
        hyy = (_complex_step_grad(f, x[0], x[1] + h)
               - _complex_step_grad(f, x[0], x[1] - h)) / (2 * h)
        hess = np.array([hxx, hyy]).T
        hess = (hess + hess.T) / 2
        try:
            delta = np.linalg.solve(hess, g)
        except np.linalg.LinAlgError:
            break
        xn = x - delta
        if not (0 < xn[0] < xn[1] < 1):
            break
        x = xn
    return x, float(np.linalg.norm(last_g)), it + 1


def _grid_scan(f, resolution=200):
    best = None
    for lam in np.linspace(1e-3, 0.999, resolution):
        for mu in np.linspace(lam + 1e-3, 0.999, resolution):
            if not 0 < lam < mu < 1:
                continue
            val = f(lam, mu)
            if best is None or val > best[0]:
                best = (val, lam, mu)
    return best[1], best[2]


def _maximize(f, start=None, resolution=200):
    if start is None:
        start = _grid_scan(f, resolution)
    guarded = lambda p: (-f(p[0], p[1])
                         if 0 < p[0] < p[1] < 1 else math.inf)
    res = minimize(guarded, list(start), method="Nelder-Mead",
                   options=dict(xatol=1e-10, fatol=1e-13,
                                maxiter=10_000, maxfev=10_000))
    x, gnorm, nit = _newton_polish(f, res.x)
    return x, gnorm, res.nit + nit


def maximize_basic(start=None) -> OptResult:
    """Deterministic maximum of F_basic over 0 < lambda < mu < 1.

    The optimum satisfies 8 mu^3 - 4 mu^2 - 7 mu + 4 = 0 and
    lambda = 8 mu^2 + 2 mu - 4; those identities are left to the tests,
    the optimizer itself never uses them.
    """
    x, gnorm, nit = _maximize(F_basic, start)
    val = F_basic(*x)
    return OptResult(x[0], x[1], None, val, val / E, nit, gnorm)


def maximize_equalized(start=None) -> OptResult:
    x, gnorm, nit = _maximize(equalized_objective, start)
    val = equalized_objective(*x)
    rho = 1 + x[0] - x[0] / x[1]
    r = solve_r(2 * rho * x[0] ** 2 * x[1] * (1 - x[1]))
    return OptResult(x[0], x[1], r, val, val / E, nit, gnorm)


def minimize_q(n: int, start=None, resolution=120) -> QRow:
    """Per-n minimum of Q over the triangle."""
    f = lambda lam, mu: -q_value(n, lam, mu)
    if start is None:
        start = _grid_scan(f, resolution)
    guarded = lambda p: (q_value(n, p[0], p[1])
                         if 0 < p[0] < p[1] < 1 else math.inf)
    res = minimize(guarded, list(start), method="Nelder-Mead",
                   options=dict(xatol=1e-11, fatol=1e-13,
                                maxiter=10_000, maxfev=10_000))
    x, _, _ = _newton_polish(f, res.x)
    lam, mu = float(x[0]), float(x[1])
    tinf = certified_t_inf(n, lam, mu, 1.0)
    return QRow(n, lam, mu, true_radius(n, 1.0) / tinf, true_radius(n, 1.0), tinf)


def q_table(ns) -> list[QRow]:
    return [minimize_q(int(n)) for n in ns]


# -- independent radius oracle ------------------------------------------


def _log_abs_inverse_coeff(m: int, n: int, beta: float):
    """log |psi_m| for the inverse of z sqrt(1 + 2 beta z^(n-2)).

    The inverse coefficients have the closed form
    psi_m = (1/m) C(-m/2, j) (2 beta)^j with j = (m-1)/(n-2) (zero when
    that is not an integer), obtained by expanding (1 + 2 beta w^(n-2))
    to the power -m/2 under the classical inversion integral.  Evaluated
    in log space via lgamma so no overflow occurs.
    """
    d = n - 2
    if (m - 1) % d != 0:
        return None
    j = (m - 1) // d
    if j == 0:
        return -math.log(m)
    lb = math.lgamma(m / 2 + j) - math.lgamma(m / 2) - math.lgamma(j + 1)
    return -math.log(m) + lb + j * math.log(2 * beta)


def radius_oracle_series(n: int, beta, terms: int = 200) -> float:
    """Numeric estimate of the inversion radius by the root test.

    Computes |psi_m|^(-1/m) for the stored coefficients and removes the
    leading 1/m bias by Richardson extrapolation over the tail, taking a
    median for robustness.  Independent of the closed form true_radius.
    """
    if terms < 50:
        raise ValueError("need at least 50 terms for a stable estimate")
    if n < 3 or beta <= 0:
        raise ValueError("need n >= 3 and beta > 0")
    ms, roots = [], []
    for m in range(2, terms + 1):
        la = _log_abs_inverse_coeff(m, n, float(beta))
        if la is None:
            continue
        ms.append(m)
        roots.append(math.exp(-la / m))
    if len(ms) < 8:
        raise ValueError("too few nonzero coefficients below %d terms" % terms)
    tail = max(4, len(ms) // 3)
    extrapolated = []
    for i in range(len(ms) - tail, len(ms) - 1):
        m1, m2 = ms[i], ms[i + 1]
        extrapolated.append((m2 * roots[i + 1] - m1 * roots[i]) / (m2 - m1))
    return float(np.median(extrapolated))
