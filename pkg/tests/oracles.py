"""Independent reference computations used by the tests.

Nothing here calls the closed forms under test: the costate is obtained by
numerically integrating its ODE, the state by a separate RK4 loop or by
scipy's adaptive solver.
"""

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq


def costate_after_period(lam0, rho1, rho2, t_s, T=1.0):
    """Return (lambda(t_s), lambda(T)) from an adaptive ODE solve."""
    a = solve_ivp(lambda t, y: [rho1 * y[0] + 1], (0, t_s), [lam0], rtol=1e-12, atol=1e-14).y[0, -1]
    b = solve_ivp(lambda t, y: [rho2 * y[0] + 1], (t_s, T), [a], rtol=1e-12, atol=1e-14).y[0, -1]
    return a, b


def periodic_costate_root(rho1, rho2, t_s, T=1.0):
    """The initial costate whose one-period image is itself, by bracketing."""
    return brentq(lambda l: costate_after_period(l, rho1, rho2, t_s, T)[1] - l, -50.0, -1e-6, xtol=1e-15)


def rk4_costate(lam0, rho1, rho2, t_s, T, periods, h):
    """Fixed-step RK4 on lambda' = rho(t) lambda + 1 with steps aligned to switches.

    Returns sample times and values.
    """
    times, values = [0.0], [lam0]
    lam = lam0
    for k in range(periods):
        for a, b, rho in ((k * T, k * T + t_s, rho1), (k * T + t_s, (k + 1) * T, rho2)):
            n = max(1, round((b - a) / h))
            step = (b - a) / n
            for i in range(n):
                k1 = rho * lam + 1
                k2 = rho * (lam + 0.5 * step * k1) + 1
                k3 = rho * (lam + 0.5 * step * k2) + 1
                k4 = rho * (lam + step * k3) + 1
                lam += step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                times.append(a + (i + 1) * step)
                values.append(lam)
    return np.array(times), np.array(values)


def period_start_states(params, control_of_t, periods, h):
    """x at t = kT, k = 0..periods, by fixed-step RK4 with a time-only control."""
    beta = params.beta
    x = params.x0
    out = [x]
    T, t_s = params.T, params.t_s
    for k in range(periods):
        for a, b, delta in ((k * T, k * T + t_s, params.delta1), (k * T + t_s, (k + 1) * T, params.delta2)):
            n = max(1, round((b - a) / h))
            step = (b - a) / n
            for i in range(n):
                t = a + i * step
                f = lambda tt, xx: beta * control_of_t(tt) - delta * xx
                k1 = f(t, x)
                k2 = f(t + step / 2, x + step / 2 * k1)
                k3 = f(t + step / 2, x + step / 2 * k2)
                k4 = f(t + step, x + step * k3)
                x += step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(x)
    return np.array(out)


def constant_control_segment(x0, beta, c, delta, length):
    """Exact solution of x' = beta c - delta x after ``length``."""
    eq = beta * c / delta
    return eq + (x0 - eq) * math.exp(-delta * length)
