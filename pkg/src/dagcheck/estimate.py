"""Least-squares and instrumental-variable estimators.

Both work on samples (:class:`~dagcheck.dataset.Dataset`); the ``population_``
variants work on an exact covariance matrix instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import RankDeficient, WeakInstrument
from .scm import CovMatrix

RCOND_TOL = 1e-10
WEAK_INSTRUMENT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class RegressionFit:
    """Result of fitting ``response = intercept + sum(coef_i * predictor_i) + error``."""

    response: str
    predictors: tuple[str, ...]
    intercept: float
    coefficients: tuple[float, ...]
    residuals: np.ndarray
    r_squared: float

    def coef(self, name: str) -> float:
        return self.coefficients[self.predictors.index(name)]

    def as_dict(self) -> dict:
        return {
            "response": self.response,
            "predictors": list(self.predictors),
            "intercept": self.intercept,
            "coefficients": dict(zip(self.predictors, self.coefficients)),
            "r_squared": self.r_squared,
            "n": int(self.residuals.shape[0]),
        }


def _check_conditioning(corr: np.ndarray, names) -> None:
    # Eigenvalue ratio of the predictors' normal-equations matrix after
    # centering and unit scaling.
    eig = np.linalg.eigvalsh(corr)
    if eig.max() <= 0 or eig.min() / eig.max() < RCOND_TOL:
        raise RankDeficient(f"predictors {', '.join(names)} are collinear (rcond below {RCOND_TOL:g})")


def _check_predictors(response: str, predictors) -> tuple[str, ...]:
    predictors = tuple(predictors)
    if not predictors:
        raise ValueError("at least one predictor is required")
    if len(set(predictors)) != len(predictors):
        raise ValueError("duplicate predictors")
    if response in predictors:
        raise ValueError("response cannot also be a predictor")
    return predictors


def ols(data: Dataset, response: str, predictors) -> RegressionFit:
    """Ordinary least squares with an intercept.

    Raises :class:`RankDeficient` when the predictors (centered and scaled to
    unit length) are numerically collinear.
    """
    predictors = _check_predictors(response, predictors)
    y = data.column(response)
    x = data.matrix(predictors)
    n, p = x.shape
    if n <= p + 1:
        raise ValueError(f"need more than {p + 1} rows for {p} predictors, got {n}")

    x_mean = x.mean(axis=0)
    xc = x - x_mean
    norms = np.linalg.norm(xc, axis=0)
    if np.any(norms == 0):
        const = [v for v, s in zip(predictors, norms) if s == 0]
        raise RankDeficient(f"constant predictor(s) {', '.join(const)} are collinear with the intercept")
    xs = xc / norms
    _check_conditioning(xs.T @ xs, predictors)

    y_mean = y.mean()
    q, r = np.linalg.qr(xs)
    beta_scaled = np.linalg.solve(r, q.T @ (y - y_mean))
    beta = beta_scaled / norms
    intercept = float(y_mean - x_mean @ beta)
    resid = y - intercept - x @ beta

    sst = float(np.sum((y - y_mean) ** 2))
    ssr = float(resid @ resid)
    r2 = 1.0 if sst == 0 else min(1.0, max(0.0, 1.0 - ssr / sst))
    return RegressionFit(response, predictors, intercept, tuple(float(b) for b in beta), resid, r2)


def population_ols(cov: CovMatrix, response: str, predictors) -> dict[str, float]:
    """Population regression slopes ``Sigma_xx^-1 Sigma_xy`` from a covariance matrix."""
    predictors = _check_predictors(response, predictors)
    sxx = cov.sub(predictors)
    sxy = cov.sub(predictors, [response])[:, 0]
    sd = np.sqrt(np.diag(sxx))
    if np.any(sd == 0):
        raise RankDeficient("a predictor has zero variance")
    _check_conditioning(sxx / np.outer(sd, sd), predictors)
    beta = np.linalg.solve(sxx, sxy)
    return {v: float(b) for v, b in zip(predictors, beta)}


def sample_covariance(data: Dataset, names=None) -> CovMatrix:
    names = list(data.columns if names is None else names)
    if data.n < 2:
        raise ValueError("need at least two rows for a sample covariance")
    m = np.atleast_2d(np.cov(data.matrix(names), rowvar=False, ddof=1))
    return CovMatrix(tuple(names), (m + m.T) / 2)


def iv_estimate(source: Dataset | CovMatrix, z: str, x: str, y: str) -> float:
    """Wald/IV estimate ``cov(z, y) / cov(z, x)`` of the effect of ``x`` on ``y``."""
    cov = sample_covariance(source, list(dict.fromkeys([z, x, y]))) if isinstance(source, Dataset) else source
    czx = cov[z, x]
    if abs(czx) <= WEAK_INSTRUMENT_TOL:
        raise WeakInstrument(f"cov({z}, {x}) = {czx:.3g}; {z} carries no information about {x}")
    return cov[z, y] / czx
