"""Hyper-dual numbers for exact first and second derivatives.

A value a + b e1 + c e2 + d e1e2 with e1**2 = e2**2 = 0. Seeding
x_i += e1 and x_j += e2 makes the e1e2 part equal to d2f/dxi dxj with
no truncation error, which finite differences cannot match near
degenerate eigenvalues.
"""

from __future__ import annotations

import math

import numpy as np


class HD:
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b=0.0, c=0.0, d=0.0):
        self.a, self.b, self.c, self.d = float(a), float(b), float(c), float(d)

    def __repr__(self):
        return f"HD({self.a}, {self.b}, {self.c}, {self.d})"

    def _chain(self, f0, f1, f2):
        return HD(f0, f1 * self.b, f1 * self.c, f1 * self.d + f2 * self.b * self.c)

    def __add__(self, o):
        if isinstance(o, HD):
            return HD(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
        return HD(self.a + o, self.b, self.c, self.d)

    __radd__ = __add__

    def __neg__(self):
        return HD(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, HD):
            return HD(
                self.a * o.a,
                self.a * o.b + self.b * o.a,
                self.a * o.c + self.c * o.a,
                self.a * o.d + self.d * o.a + self.b * o.c + self.c * o.b,
            )
        return HD(self.a * o, self.b * o, self.c * o, self.d * o)

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.a
        return self._chain(1.0 / a, -1.0 / a**2, 2.0 / a**3)

    def __truediv__(self, o):
        if isinstance(o, HD):
            return self * o.reciprocal()
        return self * (1.0 / o)

    def __rtruediv__(self, o):
        return self.reciprocal() * o

    def __pow__(self, n):
        if isinstance(n, int) and n >= 0:
            out = HD(1.0)
            for _ in range(n):
                out = out * self
            return out
        a = self.a
        return self._chain(a**n, n * a ** (n - 1), n * (n - 1) * a ** (n - 2))

    def sqrt(self):
        r = math.sqrt(self.a)
        return self._chain(r, 0.5 / r, -0.25 / (r * self.a))

    def cos(self):
        return self._chain(math.cos(self.a), -math.sin(self.a), -math.cos(self.a))

    def sin(self):
        return self._chain(math.sin(self.a), math.cos(self.a), -math.sin(self.a))


def sqrt(x):
    return x.sqrt() if isinstance(x, HD) else math.sqrt(x)


def cos(x):
    return x.cos() if isinstance(x, HD) else math.cos(x)


def sin(x):
    return x.sin() if isinstance(x, HD) else math.sin(x)


def value(x) -> float:
    return x.a if isinstance(x, HD) else float(x)


def hessian(f, x) -> np.ndarray:
    """Exact Hessian of a scalar function written with HD-aware operations."""
    x = [float(v) for v in x]
    n = len(x)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            args = [HD(v) for v in x]
            args[i] = HD(x[i], 1.0, 1.0 if i == j else 0.0, 0.0)
            if i != j:
                args[j] = HD(x[j], 0.0, 1.0, 0.0)
            out[i, j] = out[j, i] = f(args).d
    return out


def gradient(f, x) -> np.ndarray:
    x = [float(v) for v in x]
    g = np.zeros(len(x))
    for i in range(len(x)):
        args = [HD(v) for v in x]
        args[i] = HD(x[i], 1.0)
        g[i] = f(args).b
    return g


def partial(f, x, i: int) -> float:
    """One first partial derivative, exact."""
    args = [HD(float(v)) for v in x]
    args[i] = HD(float(x[i]), 1.0)
    return f(args).b


def fd_hessian(f, x, h: float = 1e-4) -> np.ndarray:
    """Central differences with one Richardson level; plain floats only."""
    x = np.asarray(x, dtype=float)
    n = len(x)

    def central(step):
        out = np.zeros((n, n))
        steps = step * (1.0 + np.abs(x))
        f0 = f(x)
        for i in range(n):
            ei = np.zeros(n)
            ei[i] = steps[i]
            out[i, i] = (f(x + ei) - 2 * f0 + f(x - ei)) / steps[i] ** 2
            for j in range(i + 1, n):
                ej = np.zeros(n)
                ej[j] = steps[j]
                v = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (
                    4 * steps[i] * steps[j]
                )
                out[i, j] = out[j, i] = v
        return out

    return (4 * central(h / 2) - central(h)) / 3


def fd_gradient(f, x, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.zeros(len(x))
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = h * (1.0 + abs(x[i]))
        g[i] = (f(x + e) - f(x - e)) / (2 * e[i])
    return g
