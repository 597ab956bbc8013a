"""Ideal Poisson-Voronoi tessellation of the product of two hyperbolic
planes with the L1 metric: geometry, samplers, and experiments."""

from .corona import (CoronaPoint, CoronaSample, cell_assign,
                     corona_isometry_apply, nml_predicate,
                     nml_unbounded_probe, sample_corona, separation)
from .crosses import (DepositionEvent, HyperbolicCross, coverage_run,
                      inscribed_disk, mushroom_region, sample_deposition)
from .experiments import EXPERIMENTS, ExperimentConfig, run
from .field import (TIEBREAK_CONSTANT, TravelerState, end_of_cell_probe,
                    limit_field_sample, rescaled_field_sample,
                    separation_expansion, tiebreak_estimate)
from .finite_intensity import NucleiSet, delay_convergence_test, delays, voronoi_assign
from .hyperbolic import DISK, HALFPLANE, Mobius, cayley, dist_h2, kernel
from .product import ProductIsometry, ProductPoint, ball_volume, dist_l1, sample_ppp_ball
from .stats import TestReport, ks_statistic, rng_stream

__version__ = "0.1.0"
