"""Least-squares polynomial fits of plot sets and their R² (in percent).

x values are centred on their mean and divided by their largest absolute
deviation before the Vandermonde system is solved by QR, which keeps
degree 9 on currency-scale x well conditioned. Coefficients are reported
in raw x units, highest power first; residuals and evaluation use the
scaled form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import solve_triangular

from .errors import DegenerateVariance, DegreeTooHigh, InvalidParameter, RankDeficient


@dataclass(frozen=True)
class PolynomialFit:
    """Fitted polynomial.

    ``coefficients`` are in raw x, highest power first (P1, P2 for a line).
    ``basis_coefficients`` describe the same polynomial in
    ``t = (x - center) / scale``, also highest power first.
    """

    degree: int
    coefficients: tuple[float, ...]
    r_squared_percent: float
    ss_res: float
    ss_tot: float
    n_points: int
    center: float = 0.0
    scale: float = 1.0
    basis_coefficients: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if len(self.coefficients) != self.degree + 1:
            raise InvalidParameter(f"degree {self.degree} needs {self.degree + 1} coefficients")
        if self.basis_coefficients is None:
            if self.center != 0.0 or self.scale != 1.0:
                raise InvalidParameter("basis_coefficients required with a shifted basis")
            object.__setattr__(self, "basis_coefficients", self.coefficients)

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[float]) -> PolynomialFit:
        """A bare polynomial (no data behind it), e.g. for evaluation or R² of a fixed curve."""
        coefficients = tuple(coefficients)
        return cls(len(coefficients) - 1, coefficients, float("nan"), float("nan"), float("nan"), 0)


def _as_arrays(points) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(points, "points"):
        points = points.points
    arr = np.asarray(points, dtype=float).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


def _to_raw(basis_coefs: np.ndarray, center: float, scale: float) -> np.ndarray:
    q = Polynomial(basis_coefs[::-1])
    raw = q(Polynomial([-center / scale, 1.0 / scale])).coef
    out = np.zeros(len(basis_coefs))
    out[: len(raw)] = raw
    return out[::-1]


def _sums(y: np.ndarray, fitted: np.ndarray) -> tuple[float, float]:
    resid = y - fitted
    ss_res = float(resid @ resid)
    if np.ptp(y) == 0:
        return ss_res, 0.0
    dev = y - y.mean()
    return ss_res, float(dev @ dev)


def _percent(ss_res: float, ss_tot: float, y: np.ndarray) -> float:
    if ss_tot > 0:
        return 100.0 * (1.0 - ss_res / ss_tot)
    # constant data: only an exact fit is meaningful
    tol = len(y) * (1e-12 * max(1.0, float(np.max(np.abs(y))))) ** 2
    if ss_res <= tol:
        return 100.0
    raise DegenerateVariance("data has zero variance but the fit leaves residuals")


def fit(points, degree: int) -> PolynomialFit:
    """Ordinary least squares fit of ``p`` on ``x``.

    ``points`` is a sequence of ``(x, p)`` pairs or a plot set.
    """
    if int(degree) != degree or degree < 1:
        raise InvalidParameter(f"degree must be a positive integer, got {degree}")
    degree = int(degree)
    x, y = _as_arrays(points)
    n = len(x)
    if n < degree + 1:
        raise DegreeTooHigh(f"degree {degree} needs at least {degree + 1} points, got {n}")
    if len(np.unique(x)) < degree + 1:
        raise RankDeficient(f"degree {degree} needs {degree + 1} distinct x values, got {len(np.unique(x))}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidParameter("points must be finite")

    center = float(x.mean())
    scale = float(np.max(np.abs(x - center)))
    t = (x - center) / scale
    vander = np.vander(t, degree + 1)
    q, r = np.linalg.qr(vander)
    diag = np.abs(np.diag(r))
    if diag.min() <= diag.max() * n * np.finfo(float).eps:
        raise RankDeficient("Vandermonde matrix is numerically singular")
    basis = solve_triangular(r, q.T @ y)

    ss_res, ss_tot = _sums(y, vander @ basis)
    return PolynomialFit(
        degree=degree,
        coefficients=tuple(_to_raw(basis, center, scale)),
        r_squared_percent=_percent(ss_res, ss_tot, y),
        ss_res=ss_res,
        ss_tot=ss_tot,
        n_points=n,
        center=center,
        scale=scale,
        basis_coefficients=tuple(float(b) for b in basis),
    )


def evaluate(result: PolynomialFit, x):
    """Horner evaluation at a scalar or array ``x``."""
    t = (np.asarray(x, dtype=float) - result.center) / result.scale
    acc = np.zeros_like(t)
    for c in result.basis_coefficients:
        acc = acc * t + c
    return float(acc) if acc.ndim == 0 else acc


def r_squared(points, result: PolynomialFit) -> float:
    """Coefficient of determination of ``result`` on ``points``, in percent (not clamped)."""
    x, y = _as_arrays(points)
    if len(x) == 0:
        raise InvalidParameter("no points")
    ss_res, ss_tot = _sums(y, np.asarray(evaluate(result, x)))
    return _percent(ss_res, ss_tot, y)


def curve(result: PolynomialFit, lo: float, hi: float, samples: int = 200) -> list[tuple[float, float]]:
    """``samples`` evenly spaced points of the fitted curve over ``[lo, hi]``."""
    xs = np.linspace(lo, hi, samples)
    return list(zip(xs.tolist(), np.atleast_1d(evaluate(result, xs)).tolist()))
