"""Spectral adaptation of least-squares regressors under covariate shift.

The central entry point is :func:`spar.adapt.spar_adapt`, which fits the
minimum-norm least-squares regressor on source data and projects out the
target eigendirections whose estimated signal is indistinguishable from
amplified label noise.
"""

from spar.adapt import (
    AdaptationReport,
    SelectionSet,
    pcr_fit,
    select_oracle,
    select_spar,
    spar_adapt,
)
from spar.riskmodel import EigenLedger, ols_ood_risk, projected_risk
from spar.spectral import RankTolerance, Spectrum, decompose, pinv_solve, project_out

__all__ = [
    "AdaptationReport",
    "EigenLedger",
    "RankTolerance",
    "SelectionSet",
    "Spectrum",
    "decompose",
    "ols_ood_risk",
    "pcr_fit",
    "pinv_solve",
    "project_out",
    "projected_risk",
    "select_oracle",
    "select_spar",
    "spar_adapt",
]

__version__ = "0.1.0"
