"""Spectrally adapted regression: eigendirection selection and projection."""

from dataclasses import dataclass

import numpy as np

from spar import riskmodel
from spar.spectral import decompose, pinv_apply, project_out
from spar.statfun import DEFAULT_ALPHA, check_alpha, chi2_df1_inv_cdf, mle_sigma2


@dataclass(frozen=True, eq=False)
class SelectionSet:
    """Target eigendirections chosen for removal (1-based, ascending)."""

    indices: tuple
    vectors: np.ndarray

    @classmethod
    def from_mask(cls, mask, spec_z):
        mask = np.asarray(mask, dtype=bool)
        idx = np.flatnonzero(mask)
        return cls(
            indices=tuple(int(i) + 1 for i in idx),
            vectors=spec_z.right_vectors[idx],
        )

    def __len__(self):
        return len(self.indices)


@dataclass(eq=False)
class AdaptationReport:
    alpha: float
    sigma2_hat: float
    weights_ols: np.ndarray
    weights_spar: np.ndarray
    selection: SelectionSet
    ledger: riskmodel.EigenLedger
    source_rank: int
    rank_deficient: bool

    @property
    def selected_indices(self):
        return list(self.selection.indices)


def spar_verdicts(var, bias_hat, alpha=DEFAULT_ALPHA):
    """Selection rule: keep a direction for removal iff ``q_alpha * var >= bias_hat``.

    Works elementwise, so ``bias_hat`` may carry a trailing batch axis.
    """
    threshold = chi2_df1_inv_cdf(alpha)
    var = np.asarray(var, dtype=float)
    bias_hat = np.asarray(bias_hat, dtype=float)
    if bias_hat.ndim > var.ndim:
        var = var.reshape(var.shape + (1,) * (bias_hat.ndim - var.ndim))
    return threshold * var >= bias_hat


def select_spar(spec_x, spec_z, w_hat, sigma2, alpha=DEFAULT_ALPHA):
    alpha = check_alpha(alpha)
    var = riskmodel.variance_terms(spec_x, spec_z, sigma2)
    bias_hat = riskmodel.bias_terms(w_hat, spec_z)
    mask = spar_verdicts(var, bias_hat, alpha)
    ledger = riskmodel.EigenLedger(
        lambda_z_sq=spec_z.singular_values**2,
        var_zj=var,
        selected=mask,
        bias_hat_zj=bias_hat,
    )
    return SelectionSet.from_mask(mask, spec_z), ledger


def select_oracle(spec_x, spec_z, w_star, sigma2):
    """Risk-optimal selection: every direction whose variance loss is at least its bias loss."""
    var = riskmodel.variance_terms(spec_x, spec_z, sigma2)
    bias = riskmodel.bias_terms(w_star, spec_z)
    return SelectionSet.from_mask(var >= bias, spec_z)


def spar_adapt(x, y, z, alpha=DEFAULT_ALPHA, tol=None, sigma2=None):
    """Fit OLS on ``(x, y)`` and adapt it to the unlabeled target sample ``z``.

    ``sigma2`` overrides the maximum-likelihood noise estimate when the
    noise level is known.
    """
    alpha = check_alpha(alpha)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != x.shape[0]:
        raise ValueError(f"targets have shape {y.shape}, expected ({x.shape[0]},)")
    if x.ndim != 2 or z.ndim != 2 or x.shape[1] != z.shape[1]:
        raise ValueError(f"train {x.shape} and test {z.shape} must share the feature dimension")
    spec_x = decompose(x, tol)
    spec_z = decompose(z, tol)
    w_hat = pinv_apply(spec_x, y)
    if sigma2 is None:
        sigma2 = mle_sigma2(x, y, w_hat)
    selection, ledger = select_spar(spec_x, spec_z, w_hat, sigma2, alpha)
    w_proj = project_out(w_hat, selection.vectors)
    return AdaptationReport(
        alpha=alpha,
        sigma2_hat=float(sigma2),
        weights_ols=w_hat,
        weights_spar=w_proj,
        selection=selection,
        ledger=ledger,
        source_rank=spec_x.numerical_rank,
        rank_deficient=spec_x.numerical_rank < x.shape[1],
    )


def pcr_fit(x, y, k, tol=None):
    """Principal component regression on the top-``k`` uncentered components of ``x``."""
    x = np.asarray(x, dtype=float)
    d = x.shape[1]
    if not (1 <= k <= d):
        raise ValueError(f"k must lie in 1..{d}, got {k}")
    spec = decompose(x, tol)
    basis = spec.right_vectors[:k]
    scores = decompose(x @ basis.T, tol)
    return basis.T @ pinv_apply(scores, y)
