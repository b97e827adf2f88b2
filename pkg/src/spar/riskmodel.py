"""Closed-form out-of-distribution risk of (projected) least-squares regressors.

All quantities are expressed per target eigendirection ``j`` (1-based,
ordered by descending target singular value):

* ``var_zj``  -- noise loss paid for keeping direction j,
* ``bias_zj`` -- signal loss paid for projecting it out (needs ``w*``),
* ``bias_hat_zj`` -- the same signal loss estimated from ``w_hat``.

Target directions whose singular value falls below the rank cutoff are
kept in the ledger with zero variance and zero bias.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class EigenLedger:
    lambda_z_sq: np.ndarray
    var_zj: np.ndarray
    selected: np.ndarray
    bias_hat_zj: np.ndarray | None = None
    bias_zj: np.ndarray | None = None
    j: np.ndarray = field(init=False)

    def __post_init__(self):
        self.j = np.arange(1, len(self.lambda_z_sq) + 1)

    def __len__(self):
        return len(self.lambda_z_sq)

    def records(self):
        """Rows in the serialized (JSON) layout."""
        if self.bias_hat_zj is None:
            raise ValueError("ledger has no estimated bias to serialize")
        return [
            {
                "j": int(j),
                "lambda_z_sq": float(l2),
                "var_zj": float(v),
                "bias_hat_zj": float(bh),
                "selected": bool(s),
            }
            for j, l2, v, bh, s in zip(
                self.j, self.lambda_z_sq, self.var_zj, self.bias_hat_zj, self.selected
            )
        ]


def _check_sigma2(sigma2):
    sigma2 = float(sigma2)
    if not sigma2 >= 0.0:
        raise ValueError(f"sigma2 must be nonnegative, got {sigma2!r}")
    return sigma2


def _check_same_features(spec_x, spec_z):
    if spec_x.n_features != spec_z.n_features:
        raise ValueError(
            f"feature dimensions differ: source {spec_x.n_features}, target {spec_z.n_features}"
        )


def _inverse_sq(spec_x):
    keep = spec_x.positive
    out = np.zeros_like(spec_x.singular_values)
    out[keep] = 1.0 / spec_x.singular_values[keep] ** 2
    return out


def variance_term(spec_x, e_zj, lambda_zj, sigma2):
    """``sigma2 * sum_i lambda_zj^2 / lambda_xi^2 * <e_xi, e_zj>^2`` over positive ``lambda_xi``."""
    sigma2 = _check_sigma2(sigma2)
    e_zj = np.asarray(e_zj, dtype=float)
    overlap = spec_x.right_vectors @ e_zj
    return sigma2 * float(lambda_zj) ** 2 * float(np.sum(_inverse_sq(spec_x) * overlap**2))


def variance_terms(spec_x, spec_z, sigma2):
    """Vector of per-direction variance losses for every target direction."""
    sigma2 = _check_sigma2(sigma2)
    _check_same_features(spec_x, spec_z)
    overlap = spec_z.right_vectors @ spec_x.right_vectors.T  # [j, i]
    per_j = (overlap**2) @ _inverse_sq(spec_x)
    var = sigma2 * spec_z.singular_values**2 * per_j
    var[~spec_z.positive] = 0.0
    return var


def bias_term(w_star, e_zj, lambda_zj):
    """``<w*, e_zj>^2 * lambda_zj^2``; ``w_star`` may be a ``D x T`` batch."""
    proj = np.asarray(e_zj, dtype=float) @ np.asarray(w_star, dtype=float)
    return proj**2 * float(lambda_zj) ** 2


def bias_hat(w_hat, e_zj, lambda_zj):
    """Plug-in bias estimate using the fitted weights instead of ``w*``."""
    return bias_term(w_hat, e_zj, lambda_zj)


def bias_terms(w, spec_z):
    """Per-direction ``<w, e_zj>^2 lambda_zj^2`` for every target direction."""
    w = np.asarray(w, dtype=float)
    if w.shape[0] != spec_z.n_features:
        raise ValueError(f"weights have length {w.shape[0]}, features {spec_z.n_features}")
    proj = spec_z.right_vectors @ w
    lam_sq = spec_z.singular_values**2
    if proj.ndim == 2:
        lam_sq = lam_sq[:, None]
    out = proj**2 * lam_sq
    out[~spec_z.positive] = 0.0
    return out


def ols_ood_risk(spec_x, spec_z, sigma2):
    """Expected target squared error of the pseudoinverse regressor."""
    return float(np.sum(variance_terms(spec_x, spec_z, sigma2)))


def _selection_mask(selected, k):
    mask = np.zeros(k, dtype=bool)
    for j in selected:
        if not (1 <= int(j) <= k):
            raise IndexError(f"direction index {j} outside 1..{k}")
        mask[int(j) - 1] = True
    return mask


def projected_risk(spec_x, spec_z, sigma2, w_star, selected):
    """Expected target squared error after projecting out ``selected`` directions.

    Returns ``(total, ledger)``: the loss is the variance of every kept
    direction plus the true bias of every removed one.
    """
    var = variance_terms(spec_x, spec_z, sigma2)
    bias = bias_terms(w_star, spec_z)
    mask = _selection_mask(selected, len(var))
    total = float(np.sum(var[~mask]) + np.sum(bias[mask]))
    ledger = EigenLedger(
        lambda_z_sq=spec_z.singular_values**2,
        var_zj=var,
        selected=mask,
        bias_zj=bias,
    )
    return total, ledger


def inflation_profile(spec_x, spec_z, sigma2):
    """Per-direction variance loss divided by the number of target rows.

    Returns a list of ``(j, lambda_z_sq, normalized_var)`` tuples in
    descending order of target singular value.
    """
    var = variance_terms(spec_x, spec_z, sigma2)
    m = spec_z.shape[0]
    lam_sq = spec_z.singular_values**2
    return [(j + 1, float(lam_sq[j]), float(var[j] / m)) for j in range(len(var))]
