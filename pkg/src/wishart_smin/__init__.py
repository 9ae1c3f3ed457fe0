"""Exact smallest-eigenvalue laws for complex Wishart and fixed-trace matrices,
with Monte Carlo, Tracy-Widom and coupled-kicked-top comparisons."""

from .exact import (
    EnsembleParams,
    NormalizationError,
    SminClosedForm,
    cdf,
    eval_density,
    form_from_json,
    form_to_json,
    moment,
    norm_constant,
    recurrence_g,
    smin_closed_form,
)
from .fixed_trace import (
    FTSminClosedForm,
    eval_ft_density,
    ft_cdf,
    ft_closed_form,
    ft_moment,
    r_delta,
    r_delta_exact,
    scaled_approx_density,
)
from .grid import GridDensity, parse_grid
from .kicked_tops import (
    CoherentAngles,
    SchmidtSpectrum,
    TopParams,
    coherent_state,
    floquet_factors,
    run_ensemble,
    schmidt_spectrum,
    step,
    wigner_d_half_pi,
)
from .marginals import marginal_ft, marginal_mp, marginal_regular, marginal_scaled
from .montecarlo import SampleSet, histogram, ks_statistic, sample_ginibre, smallest_eig_samples
from .polynomial import RationalPolynomial
from .tracy_widom import TWScaling, rescaled_smin_density, tw2_cdf, tw2_density, tw_scaling

__all__ = [
    "CoherentAngles",
    "EnsembleParams",
    "FTSminClosedForm",
    "GridDensity",
    "NormalizationError",
    "RationalPolynomial",
    "SampleSet",
    "SchmidtSpectrum",
    "SminClosedForm",
    "TWScaling",
    "TopParams",
    "cdf",
    "coherent_state",
    "eval_density",
    "eval_ft_density",
    "floquet_factors",
    "form_from_json",
    "form_to_json",
    "ft_cdf",
    "ft_closed_form",
    "ft_moment",
    "histogram",
    "ks_statistic",
    "marginal_ft",
    "marginal_mp",
    "marginal_regular",
    "marginal_scaled",
    "moment",
    "norm_constant",
    "parse_grid",
    "r_delta",
    "r_delta_exact",
    "recurrence_g",
    "rescaled_smin_density",
    "run_ensemble",
    "sample_ginibre",
    "scaled_approx_density",
    "schmidt_spectrum",
    "smallest_eig_samples",
    "smin_closed_form",
    "step",
    "tw2_cdf",
    "tw2_density",
    "tw_scaling",
    "wigner_d_half_pi",
]
