"""Coupled random contractions on heterogeneous networks.

Subpackages: counter-based noise, circle map families and reduced
dynamics, Chung-Lu graph sampling, the network simulation engine,
statistical diagnostics, and a command-line front end.
"""

from .noise import NoiseOracle
from .dynamics import (
    MapFamily,
    Coupling,
    StationaryMeasure,
    ReducedMap,
    reduced_fixed_points,
    trapping_region,
    stationary_sampler,
    fourier_coeffs,
    wrap01,
    circle_dist,
    circle_signed_diff,
)
from .graphs import (
    ChungLuParams,
    WeightSequence,
    Graph,
    expected_weights,
    sample_chung_lu,
    giant_component,
    star_like_report,
    degree_concentration,
    hub_scales,
)

__version__ = "0.1.0"
