"""Smooth cutoffs and Gauss-Legendre quadrature helpers."""
import numpy as np

_GL_CACHE = {}


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, all derivatives flat at both ends."""
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 1.0, 1.0, 0.0)
    inner = (x > 0.0) & (x < 1.0)
    if np.any(inner):
        xi = x[inner]
        with np.errstate(over="ignore"):
            out[inner] = 1.0 / (1.0 + np.exp(1.0 / xi - 1.0 / (1.0 - xi)))
    return out if out.ndim else float(out)


def smooth_step_complement(x):
    """1 - smooth_step(x), computed without cancellation near x = 1."""
    return smooth_step(1.0 - np.asarray(x, dtype=float))


def smooth_step_d1(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inner = (x > 0.0) & (x < 1.0)
    if np.any(inner):
        xi = x[inner]
        z = 1.0 / xi - 1.0 / (1.0 - xi)
        with np.errstate(over="ignore"):
            s = 1.0 / (1.0 + np.exp(z))
            c = 1.0 / (1.0 + np.exp(-z))
        out[inner] = s * c * (1.0 / xi**2 + 1.0 / (1.0 - xi) ** 2)
    return out if out.ndim else float(out)


def smooth_step_d2(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inner = (x > 0.0) & (x < 1.0)
    if np.any(inner):
        xi = x[inner]
        z = 1.0 / xi - 1.0 / (1.0 - xi)
        with np.errstate(over="ignore"):
            s = 1.0 / (1.0 + np.exp(z))
            c = 1.0 / (1.0 + np.exp(-z))
        dz = -(1.0 / xi**2 + 1.0 / (1.0 - xi) ** 2)
        ddz = 2.0 / xi**3 - 2.0 / (1.0 - xi) ** 3
        sc = s * c
        out[inner] = -sc * (s - c) * dz * dz - sc * ddz
    return out if out.ndim else float(out)


def step_scalar(x):
    """Scalar fast path of :func:`smooth_step` for ODE right-hand sides."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    z = 1.0 / x - 1.0 / (1.0 - x)
    return 0.0 if z > 700.0 else 1.0 / (1.0 + np.exp(z))


def bump(x):
    """exp(1 - 1/(1-x^2)) on (-1, 1), zero outside; equals 1 at 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inner = np.abs(x) < 1.0
    out[inner] = np.exp(1.0 - 1.0 / (1.0 - x[inner] ** 2))
    return out if out.ndim else float(out)


def gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def panel_integrals(fun, edges, order=10):
    """Integral of a vectorized ``fun`` over each panel [edges[i], edges[i+1]]."""
    x, w = gauss_legendre(order)
    a = edges[:-1, None]
    h = (edges[1:] - edges[:-1])[:, None]
    nodes = a + 0.5 * h * (x[None, :] + 1.0)
    vals = fun(nodes.ravel()).reshape(nodes.shape)
    return 0.5 * h[:, 0] * (vals @ w)


def cumulative_integral(fun, edges, order=10):
    """Running integral of ``fun`` from edges[0] to every edge."""
    return np.concatenate([[0.0], np.cumsum(panel_integrals(fun, edges, order))])


def partial_integral(fun, lo, hi, order=10):
    """Elementwise integral over [lo, hi] (arrays of equal shape)."""
    x, w = gauss_legendre(order)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    h = (hi - lo)[..., None]
    nodes = lo[..., None] + 0.5 * h * (x + 1.0)
    vals = fun(nodes.ravel()).reshape(nodes.shape)
    return 0.5 * h[..., 0] * (vals @ w)
