"""Numerical verification suites: finite-difference gradient checks,
stationarity of the closed-form updates, and membership-constraint sweeps.

These run both under pytest and on demand through the CLI ``verify``
command. Each check returns the maximum observed error so regressions are
visible, not just pass/fail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import Dataset, diamond_preset, normalize
from .indeterminacy import compute_indeterminacy
from .solver import (NeutrosophicPartition, SolverConfig, center_gradient,
                     compute_cost, fit, implied_lambda, lagrangian_gradients,
                     update_centers, update_memberships)

__all__ = ["CheckResult", "gradient_check", "stationarity_check",
           "constraint_check", "run_all_checks"]


@dataclass
class CheckResult:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error < self.tolerance

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return f"[{status}] {self.name}: max error {self.max_error:.3e} (tol {self.tolerance:g})"


def _random_instance(rng, n=10, k=3, d=2):
    pts = rng.random((n, d)) / np.sqrt(d)
    data = Dataset(pts, name="random")
    I = rng.uniform(0.05, 0.95, size=n)
    T = rng.random((n, k))
    F = rng.random(n) * 0.2
    T *= ((1.0 - F) / T.sum(axis=1))[:, None]
    centers = rng.random((k, d)) / np.sqrt(d)
    lam = rng.uniform(0.5, 1.5, size=n)
    return data, I, NeutrosophicPartition(T, F), centers, lam


def _membership_potential(data, I, T, F, centers, lam, cfg):
    """Scalar whose exact T and F partials are the analytic dT and dF:
    sum_i [ sum_j (w1 I_i)^(m-1) T_ij^m d2_ij
            + (w2 (1-I_i))^(m-1) F_i^m (k - sum_j d2_ij) ]
    - sum_i lam_i (sum_j T_ij + F_i - 1)."""
    m, k = cfg.fuzzifier, cfg.num_clusters
    d2 = ((data.points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    truth = ((cfg.w1 * I)[:, None] ** (m - 1.0) * T ** m * d2).sum()
    noise = ((cfg.w2 * (1.0 - I)) ** (m - 1.0) * F ** m * (k - d2.sum(axis=1))).sum()
    constraint = (lam * (T.sum(axis=1) + F - 1.0)).sum()
    return truth + noise - constraint


def gradient_check(seed: int = 0, trials: int = 20, n: int = 10, k: int = 3,
                   d: int = 2, step: float = 1e-6) -> list[CheckResult]:
    """Central finite differences against the analytic partials.

    dT and dF are differenced on the membership potential; dC is differenced
    on half the cost (its distance terms), whose C-gradient coincides with
    the analytic form. The center step's own normal equation is differenced
    on its potential sum_ij T_ij^m d2_ij / 2 as well.
    """
    rng = np.random.default_rng(seed)
    cfg = SolverConfig(num_clusters=k)
    errs = {"dT": 0.0, "dF": 0.0, "dC": 0.0, "center_normal_eq": 0.0}
    for _ in range(trials):
        data, I, part, centers, lam = _random_instance(rng, n, k, d)
        T, F = part.T, part.F
        dT, dF, dC = lagrangian_gradients(data, I, part, centers, lam, cfg)

        def rel(a, b):
            return abs(a - b) / max(abs(a), abs(b), 1e-12)

        for i, j in ((rng.integers(n), rng.integers(k)) for _ in range(8)):
            Tp, Tm = T.copy(), T.copy()
            Tp[i, j] += step
            Tm[i, j] -= step
            fd = (_membership_potential(data, I, Tp, F, centers, lam, cfg)
                  - _membership_potential(data, I, Tm, F, centers, lam, cfg)) / (2 * step)
            errs["dT"] = max(errs["dT"], rel(fd, dT[i, j]))
        for i in rng.integers(0, n, size=4):
            Fp, Fm = F.copy(), F.copy()
            Fp[i] += step
            Fm[i] -= step
            fd = (_membership_potential(data, I, T, Fp, centers, lam, cfg)
                  - _membership_potential(data, I, T, Fm, centers, lam, cfg)) / (2 * step)
            errs["dF"] = max(errs["dF"], rel(fd, dF[i]))
        for j, a in ((rng.integers(k), rng.integers(d)) for _ in range(4)):
            Cp, Cm = centers.copy(), centers.copy()
            Cp[j, a] += step
            Cm[j, a] -= step
            fd = (compute_cost(data, I, part, Cp, cfg)
                  - compute_cost(data, I, part, Cm, cfg)) / (2 * step) / 2.0
            errs["dC"] = max(errs["dC"], rel(fd, dC[j, a]))

        G = center_gradient(data, part, centers, cfg)

        def center_potential(C):
            d2 = ((data.points[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
            return 0.5 * ((T ** cfg.fuzzifier) * d2).sum()

        for j, a in ((rng.integers(k), rng.integers(d)) for _ in range(4)):
            Cp, Cm = centers.copy(), centers.copy()
            Cp[j, a] += step
            Cm[j, a] -= step
            fd = (center_potential(Cp) - center_potential(Cm)) / (2 * step)
            errs["center_normal_eq"] = max(errs["center_normal_eq"], rel(fd, G[j, a]))
    return [CheckResult(f"finite differences vs {name}", err, 1e-5)
            for name, err in errs.items()]


def stationarity_check(seed: int = 0, trials: int = 20, n: int = 10,
                       k: int = 3, d: int = 2) -> list[CheckResult]:
    """The closed-form updates must zero their optimality conditions.

    Memberships from :func:`update_memberships` zero dT and dF at the
    implied multiplier; centers from :func:`update_centers` zero the
    normal-equation residual of the weighted mean.
    """
    rng = np.random.default_rng(seed)
    cfg = SolverConfig(num_clusters=k)
    mem_err = 0.0
    cen_err = 0.0
    for _ in range(trials):
        data, I, part, centers, _ = _random_instance(rng, n, k, d)
        new_part = update_memberships(data, I, centers, cfg)
        lam = implied_lambda(data, I, centers, cfg)
        dT, dF, _ = lagrangian_gradients(data, I, new_part, centers, lam, cfg)
        mem_err = max(mem_err, float(np.abs(dT).max()), float(np.abs(dF).max()))

        new_centers = update_centers(data, I, part, centers, cfg)
        G = center_gradient(data, part, new_centers, cfg)
        cen_err = max(cen_err, float(np.abs(G).max()))
    return [CheckResult("membership update stationarity", mem_err, 1e-8),
            CheckResult("center update stationarity", cen_err, 1e-8)]


def constraint_check(seed: int = 0, extra_datasets=None) -> list[CheckResult]:
    """Row sums and ranges of the memberships on every bundled dataset,
    checked at every solver iteration."""
    results = []
    datasets = [diamond_preset(nm) for nm in ("x12", "x19", "x24", "x35")]
    if extra_datasets:
        datasets.extend(extra_datasets)
    for ds in datasets:
        I = compute_indeterminacy(ds, 2 if ds.n < 15 else 3)
        k = {"x12": 2, "x19": 3, "x24": 4, "x35": 3}.get(ds.name, 3)
        I = compute_indeterminacy(ds, k)
        norm, _ = normalize(ds)
        worst = {"err": 0.0, "range": 0.0}

        def watch(it, part, centers, cost):
            worst["err"] = max(worst["err"], part.row_sum_error())
            worst["range"] = max(worst["range"],
                                 float(max(-part.T.min(), part.T.max() - 1.0,
                                           -part.F.min(), part.F.max() - 1.0, 0.0)))

        fit(norm, SolverConfig(num_clusters=k, seed=seed), indeterminacy=I,
            on_iteration=watch)
        results.append(CheckResult(f"row sums on {ds.name}", worst["err"], 1e-9))
        results.append(CheckResult(f"membership range on {ds.name}", worst["range"], 1e-9))
    return results


def run_all_checks(seed: int = 0, trials: int = 20) -> list[CheckResult]:
    out = []
    out.extend(gradient_check(seed=seed, trials=trials))
    out.extend(stationarity_check(seed=seed, trials=trials))
    out.extend(constraint_check(seed=seed))
    return out
