"""Assumption checks for a multilinear regression fit, plus the shear-strength example.

The five checks map one-to-one onto the classical linear-regression
assumptions: linearity, normality of errors, little collinearity among the
predictors, independent observations and homoscedasticity. Every verdict is a
fixed-threshold comparison so reports are deterministic.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import NonPositiveInput, TooFewRows
from .estimate import RegressionFit, ols

RESET_THRESHOLD = 0.05
JARQUE_BERA_THRESHOLD = 5.99
VIF_THRESHOLD = 10.0
DURBIN_WATSON_BAND = (1.5, 2.5)
# 95th percentile of the chi-square distribution, df = 1..10.
CHI2_95 = {
    1: 3.841,
    2: 5.991,
    3: 7.815,
    4: 9.488,
    5: 11.070,
    6: 12.592,
    7: 14.067,
    8: 15.507,
    9: 16.919,
    10: 18.307,
}
# Residual sum of squares below this fraction of the total sum of squares is
# treated as an exact fit; residuals are then rounding noise.
EXACT_FIT_TOL = 1e-20

SHEAR_RANGES = {
    "rho": (0.005, 0.03),
    "fc": (20.0, 60.0),
    "bw": (200.0, 600.0),
    "d": (300.0, 900.0),
}


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Check:
    name: str
    statistic: float
    threshold: float
    verdict: Verdict
    # Upper end of the acceptance band for two-sided checks.
    threshold_high: float | None = None

    def as_dict(self) -> dict:
        d = {"name": self.name, "statistic": self.statistic, "threshold": self.threshold,
             "verdict": self.verdict.value}
        if self.threshold_high is not None:
            d["threshold_high"] = self.threshold_high
        return d


@dataclass(frozen=True)
class DiagnosticsReport:
    checks: tuple[Check, ...]
    notes: str = ""

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def all_pass(self) -> bool:
        return all(c.verdict is Verdict.PASS for c in self.checks)

    def as_dict(self) -> dict:
        return {"checks": [c.as_dict() for c in self.checks], "notes": self.notes}

    def render(self) -> str:
        lines = [f"{'check':<18}{'statistic':>14}  {'threshold':<16}verdict"]
        for c in self.checks:
            if c.threshold_high is not None:
                thr = f"[{c.threshold:g}, {c.threshold_high:g}]"
            elif math.isnan(c.threshold):
                thr = "n/a"
            else:
                thr = f"<= {c.threshold:g}"
            lines.append(f"{c.name:<18}{c.statistic:>14.6g}  {thr:<16}{c.verdict.value.upper()}")
        if self.notes:
            lines.append(f"notes: {self.notes}")
        return "\n".join(lines)


def _upper(stat: float, threshold: float) -> Verdict:
    return Verdict.PASS if stat <= threshold else Verdict.FAIL


def _lstsq_ssr(design: np.ndarray, y: np.ndarray) -> float:
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    r = y - design @ beta
    return float(r @ r)


def jarque_bera(residuals) -> float:
    """Jarque-Bera statistic from sample skewness and kurtosis (population moments)."""
    e = np.asarray(residuals, dtype=float)
    e = e - e.mean()
    m2 = np.mean(e**2)
    if m2 == 0:
        return 0.0
    skew = np.mean(e**3) / m2**1.5
    kurt = np.mean(e**4) / m2**2
    return float(len(e) / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0))


def durbin_watson(residuals) -> float:
    e = np.asarray(residuals, dtype=float)
    denom = float(e @ e)
    if denom == 0:
        return 2.0
    return float(np.sum(np.diff(e) ** 2) / denom)


def reset_increase(x: np.ndarray, y: np.ndarray, fitted: np.ndarray) -> float:
    """Share of the residual sum of squares removed by adding ``fitted**2``.

    Equals ``(R2_aug - R2) / (1 - R2)``: the partial R-squared of the squared
    fitted values given the original predictors.
    """
    ones = np.ones((len(y), 1))
    base = np.hstack([ones, x])
    ssr = _lstsq_ssr(base, y)
    if ssr == 0:
        return 0.0
    f = fitted - fitted.mean()
    f2 = f**2
    scale = np.linalg.norm(f2)
    if scale == 0:
        return 0.0
    aug = np.hstack([base, (f2 / scale)[:, None]])
    return max(0.0, (ssr - _lstsq_ssr(aug, y)) / ssr)


def breusch_pagan(x: np.ndarray, residuals: np.ndarray) -> float:
    """``n * R^2`` from regressing squared residuals on the predictors."""
    u = np.asarray(residuals, dtype=float) ** 2
    design = np.hstack([np.ones((len(u), 1)), x])
    sst = float(np.sum((u - u.mean()) ** 2))
    if sst == 0:
        return 0.0
    r2 = 1.0 - _lstsq_ssr(design, u) / sst
    return float(len(u) * max(0.0, r2))


def vif(data: Dataset, predictors) -> dict[str, float]:
    """Variance inflation factor ``1 / (1 - R_j^2)`` for each predictor.

    ``R_j^2`` comes from regressing predictor ``j`` on the remaining ones.
    """
    predictors = list(predictors)
    if len(predictors) < 2:
        raise ValueError("VIF needs at least two predictors")
    out = {}
    for j, v in enumerate(predictors):
        others = predictors[:j] + predictors[j + 1:]
        r2 = ols(data, v, others).r_squared
        out[v] = math.inf if r2 >= 1.0 else 1.0 / (1.0 - r2)
    return out


def check_assumptions(data: Dataset, fit: RegressionFit, unordered: bool = False) -> DiagnosticsReport:
    """Run the five regression-assumption checks on ``fit``.

    Parameters
    ----------
    data : Dataset
        The rows ``fit`` was estimated from, in their original order.
    fit : RegressionFit
    unordered : bool
        Rows have no meaningful order; the Durbin-Watson check is then
        reported as inconclusive.
    """
    predictors = list(fit.predictors)
    n, p = data.n, len(predictors)
    if n < p + 5:
        raise TooFewRows(f"need at least {p + 5} rows for {p} predictors, got {n}")
    x = data.matrix(predictors)
    y = data.column(fit.response)
    e = fit.residuals
    if e.shape != (n,):
        raise ValueError("fit residuals do not match the dataset rows")
    notes = []

    sst = float(np.sum((y - y.mean()) ** 2))
    exact = float(e @ e) <= EXACT_FIT_TOL * sst or sst == 0
    if exact:
        notes.append("exact fit: residuals are numerically zero, residual checks take their ideal values")

    lin = 0.0 if exact else reset_increase(x, y, y - e)
    jb = 0.0 if exact else jarque_bera(e)
    max_vif = max(vif(data, predictors).values()) if p >= 2 else 1.0
    dw = 2.0 if exact else durbin_watson(e)
    bp = 0.0 if exact else breusch_pagan(x, e)

    lo, hi = DURBIN_WATSON_BAND
    if unordered:
        dw_verdict = Verdict.INCONCLUSIVE
        notes.append("rows flagged unordered: independence not assessed")
    else:
        dw_verdict = Verdict.PASS if lo <= dw <= hi else Verdict.FAIL

    bp_threshold = CHI2_95.get(p, math.nan)
    if math.isnan(bp_threshold):
        bp_verdict = Verdict.INCONCLUSIVE
        notes.append(f"no tabulated chi-square cutoff for {p} degrees of freedom")
    else:
        bp_verdict = _upper(bp, bp_threshold)

    checks = (
        Check("linearity", lin, RESET_THRESHOLD, _upper(lin, RESET_THRESHOLD)),
        Check("normality", jb, JARQUE_BERA_THRESHOLD, _upper(jb, JARQUE_BERA_THRESHOLD)),
        Check("collinearity", max_vif, VIF_THRESHOLD, _upper(max_vif, VIF_THRESHOLD)),
        Check("independence", dw, lo, dw_verdict, threshold_high=hi),
        Check("homoscedasticity", bp, bp_threshold, bp_verdict),
    )
    return DiagnosticsReport(checks, "; ".join(notes))


def shear_strength(rho: float, fc: float, bw: float, d: float) -> float:
    """Concrete shear-strength contribution ``0.66 rho^(1/3) sqrt(fc) bw d``.

    ``rho`` is the flexural reinforcement ratio, ``fc`` the concrete
    compressive strength in MPa, ``bw`` the web width and ``d`` the effective
    depth, both in mm. Returns newtons.
    """
    for name, v in (("rho", rho), ("fc", fc), ("bw", bw), ("d", d)):
        if not v > 0:
            raise NonPositiveInput(f"{name} must be positive, got {v}")
    return 0.66 * rho ** (1.0 / 3.0) * math.sqrt(fc) * bw * d


def shear_dataset(n: int, seed: int, noise_sd: float = 0.0) -> Dataset:
    """Synthetic beams drawn uniformly over :data:`SHEAR_RANGES`, with column ``Vc``.

    ``noise_sd`` (newtons) adds Gaussian noise to ``Vc``.
    """
    if n < 10:
        raise ValueError("shear_dataset needs n >= 10")
    if noise_sd < 0:
        raise ValueError("noise_sd must be non-negative")
    rng = np.random.default_rng(seed)
    cols = {k: rng.uniform(lo, hi, n) for k, (lo, hi) in SHEAR_RANGES.items()}
    vc = 0.66 * np.cbrt(cols["rho"]) * np.sqrt(cols["fc"]) * cols["bw"] * cols["d"]
    if noise_sd > 0:
        vc = vc + rng.normal(0.0, noise_sd, n)
    values = np.column_stack([cols["rho"], cols["fc"], cols["bw"], cols["d"], vc])
    return Dataset(("rho", "fc", "bw", "d", "Vc"), values, seed=seed)
