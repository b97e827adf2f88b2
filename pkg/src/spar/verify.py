"""Monte Carlo checks of the closed-form risk and selection results.

Each check draws fresh label noise for fixed covariates and compares an
empirical frequency or mean against the formula implemented elsewhere in
the package. Checks return :class:`CheckResult` records; nothing raises
on a failed comparison.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from spar import riskmodel
from spar.adapt import select_oracle, spar_verdicts
from spar.spectral import decompose, pinv_apply, project_out
from spar.statfun import chi2_df1_cdf, chi2_df1_inv_cdf, inclusion_probability
from spar.synthetic import make_rng

CHUNK = 20000


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, name, passed, detail):
        self.checks.append(CheckResult(name, bool(passed), detail))

    def lines(self):
        return [c.line() for c in self.checks]


def random_instance(rng, d, n=50, m=40):
    """Covariates with log-uniform column scales and unrelated rotations."""
    def sample(rows):
        scales = np.exp(rng.uniform(-2.0, 2.0, d))
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        return (rng.standard_normal((rows, d)) * scales) @ q

    x = sample(n)
    z = sample(m)
    w_star = rng.standard_normal(d)
    return x, z, w_star


def _chunks(trials):
    done = 0
    while done < trials:
        size = min(CHUNK, trials - done)
        yield size
        done += size


def fitted_weights(spec_x, x, w_star, sigma2, rng, size):
    """``D x size`` batch of pseudoinverse fits to noisy labels."""
    noise = rng.standard_normal((x.shape[0], size)) * math.sqrt(sigma2)
    y = (x @ w_star)[:, None] + noise
    return pinv_apply(spec_x, y)


def mc_target_loss(x, z, w_star, sigma2, trials, rng, remove=None):
    """Mean and standard error of ``||Z w* - Z w||^2`` over noise draws.

    ``w`` is the pseudoinverse fit, with the rows of ``remove`` projected
    out when given.
    """
    spec_x = decompose(x)
    y_z = z @ w_star
    total = 0.0
    total_sq = 0.0
    for size in _chunks(trials):
        w = fitted_weights(spec_x, x, w_star, sigma2, rng, size)
        if remove is not None and len(remove):
            w = project_out(w, remove)
        r = y_z[:, None] - z @ w
        loss = np.einsum("ij,ij->j", r, r)
        total += loss.sum()
        total_sq += (loss**2).sum()
    mean = total / trials
    var = max(total_sq / trials - mean**2, 0.0)
    return mean, math.sqrt(var / trials)


def _rel_gap(expected, observed):
    if expected == 0.0:
        return 0.0 if abs(observed) <= 1e-12 else math.inf
    return abs(observed - expected) / abs(expected)


def check_ols_risk(report, rng, trials, instances=20, sigma2=0.25, rel_tol=0.02):
    worst = 0.0
    for k in range(instances):
        d = 2 + k % 5
        x, z, w_star = random_instance(rng, d)
        expected = riskmodel.ols_ood_risk(decompose(x), decompose(z), sigma2)
        observed, _ = mc_target_loss(x, z, w_star, sigma2, trials, rng)
        worst = max(worst, _rel_gap(expected, observed))
    report.add("T1 OLS risk", worst <= rel_tol,
               f"{instances} instances, worst relative gap {worst:.4f} (tol {rel_tol})")


def check_projected_risk(report, rng, trials, instances=20, sigma2=0.25, rel_tol=0.02):
    worst = 0.0
    for k in range(instances):
        d = 2 + k % 5
        x, z, w_star = random_instance(rng, d)
        spec_x, spec_z = decompose(x), decompose(z)
        mask = rng.random(d) < 0.5
        selected = [j + 1 for j in np.flatnonzero(mask)]
        expected, _ = riskmodel.projected_risk(spec_x, spec_z, sigma2, w_star, selected)
        observed, _ = mc_target_loss(
            x, z, w_star, sigma2, trials, rng, remove=spec_z.right_vectors[mask]
        )
        worst = max(worst, _rel_gap(expected, observed))
    report.add("T2 projected risk", worst <= rel_tol,
               f"{instances} instances, worst relative gap {worst:.4f} (tol {rel_tol})")


def check_oracle_dominance(report, rng, instances=20, d=6, sigma2=0.25, atol=1e-10):
    worst = math.inf
    for _ in range(instances):
        x, z, w_star = random_instance(rng, d)
        # shrink w* so that bias and variance losses are comparable
        w_star = w_star * rng.uniform(0.01, 0.3)
        spec_x, spec_z = decompose(x), decompose(z)
        best = select_oracle(spec_x, spec_z, w_star, sigma2)
        best_risk, _ = riskmodel.projected_risk(spec_x, spec_z, sigma2, w_star, best.indices)
        for r in range(d + 1):
            for subset in itertools.combinations(range(1, d + 1), r):
                risk, _ = riskmodel.projected_risk(spec_x, spec_z, sigma2, w_star, subset)
                worst = min(worst, risk - best_risk)
    report.add("T3 oracle dominance", worst >= -atol,
               f"{instances} instances x {2**d} subsets, min(risk(S) - risk(S*)) = {worst:.3e}")


def _direction_instance(rng, ratio, sigma2=0.25, d=3):
    """Instance and direction index whose bias/variance ratio equals ``ratio``."""
    x, z, _ = random_instance(rng, d)
    spec_x, spec_z = decompose(x), decompose(z)
    j = 0
    var = riskmodel.variance_terms(spec_x, spec_z, sigma2)[j]
    lam = spec_z.singular_values[j]
    w_star = spec_z.right_vectors[j] * math.sqrt(ratio * var) / lam
    return x, spec_x, spec_z, w_star, j, var


def bias_hat_draws(x, spec_x, spec_z, w_star, j, sigma2, trials, rng):
    out = np.empty(trials)
    pos = 0
    for size in _chunks(trials):
        w = fitted_weights(spec_x, x, w_star, sigma2, rng, size)
        out[pos:pos + size] = riskmodel.bias_hat(
            w, spec_z.right_vectors[j], spec_z.singular_values[j]
        )
        pos += size
    return out


def inclusion_frequency(ratio, alpha, trials, rng, sigma2=0.25):
    x, spec_x, spec_z, w_star, j, var = _direction_instance(rng, ratio, sigma2)
    bh = bias_hat_draws(x, spec_x, spec_z, w_star, j, sigma2, trials, rng)
    return float(np.mean(spar_verdicts(var, bh, alpha)))


def check_bias_hat_law(report, rng, trials, sigma2=0.25, ks_tol=0.01):
    ratio = 2.0
    x, spec_x, spec_z, w_star, j, var = _direction_instance(rng, ratio, sigma2)
    bias = ratio * var
    bh = bias_hat_draws(x, spec_x, spec_z, w_star, j, sigma2, trials, rng)
    se = bh.std() / math.sqrt(trials)
    gap = abs(bh.mean() - (bias + var))
    report.add("E  bias-hat mean", gap <= 3 * se,
               f"|mean - (bias + var)| = {gap:.3e}, 3 SE = {3 * se:.3e}")

    x, spec_x, spec_z, w_star, j, var = _direction_instance(rng, 0.0, sigma2)
    bh = bias_hat_draws(x, spec_x, spec_z, w_star, j, sigma2, trials, rng)
    ks = ks_statistic(bh / var, chi2_df1_cdf)
    report.add("E  bias-hat chi2 law", ks <= ks_tol, f"KS statistic {ks:.4f} (tol {ks_tol})")


def ks_statistic(sample, cdf):
    """Two-sided Kolmogorov-Smirnov distance between a sample and a CDF."""
    s = np.sort(np.asarray(sample, dtype=float))
    n = len(s)
    f = np.array([cdf(v) for v in s])
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def check_inclusion(report, rng, trials, ratios=(0.0, 0.25, 1.0, 4.0, 16.0), alphas=(0.5, 0.999)):
    ok = True
    worst = 0.0
    for alpha in alphas:
        for ratio in ratios:
            p = inclusion_probability(ratio, 1.0, alpha)
            freq = inclusion_frequency(ratio, alpha, trials, rng)
            se = math.sqrt(max(p * (1 - p), 1e-12) / trials)
            z = abs(freq - p) / se
            worst = max(worst, z)
            ok &= z <= 3.0
    report.add("P1 inclusion probability", ok,
               f"{len(ratios) * len(alphas)} cases, worst |freq - p| = {worst:.2f} SE (tol 3)")


def check_tails(report, rng, trials, alpha=0.999):
    freq = inclusion_frequency(1e-8, alpha, trials, rng)
    se = math.sqrt(alpha * (1 - alpha) / trials)
    report.add("L1 small-bias tail", abs(freq - alpha) <= 3 * se,
               f"frequency {freq:.5f} vs alpha {alpha} (3 SE = {3 * se:.2e})")
    big = 1e4 * chi2_df1_inv_cdf(alpha)
    freq = inclusion_frequency(big, alpha, trials, rng)
    report.add("L1 large-bias tail", freq <= 1e-3, f"frequency {freq:.2e} (tol 1e-3)")


def verify_theorems(trials=100000, seed=0, instances=20):
    """Run every Monte Carlo check; ``trials`` noise draws per comparison."""
    if trials < 1000:
        raise ValueError("trials must be at least 1000")
    rng = make_rng(seed)
    report = VerificationReport()
    check_ols_risk(report, rng, trials, instances)
    check_projected_risk(report, rng, trials, instances)
    check_oracle_dominance(report, rng, instances)
    check_bias_hat_law(report, rng, trials)
    check_inclusion(report, rng, trials)
    check_tails(report, rng, trials)
    return report
