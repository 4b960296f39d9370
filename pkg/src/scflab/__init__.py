"""Self-cycling fermentation on two essential resources.

Simulation of the impulsive batch/drain-refill system with Liebig
(minimum-law) growth, plus the analytic layer built on top of it: region
geometry, the one-cycle net growth ``mu(r)``, outcome prediction for a given
start, and the periodic orbit with its throughput.
"""
__version__ = "0.1.0"

from .errors import (DomainError, InfeasiblePathError, NoPeriodicOrbit, NoViableFraction,
                     NumericalError, RegionError, SCFError)
from .model import (CustomMonotone, ModelParams, Monod, ReactorState, Region, RegionGeometry,
                    RegionLabel, V, break_even, classify_region, g_map, growth_rate,
                    impulse_map, input_region, lambdas, pi_minus, pi_plus, validate_response)
from .batchode import (DEFAULT_QUAD, BatchSegment, QuadratureSpec, Terminal, biomass_change,
                       biomass_profile, integrate_batch, minimum_biomass, time_between)
from .analysis import (OutcomePrediction, Reason, Verdict, I_net, N0, N_bar, X_threshold, mu,
                       predict_outcome, r_star, region_geometry)
from .orbit import (PeriodicOrbit, ThroughputOptimum, optimize_Q, orbit_profile, period_T,
                    periodic_orbit, q_limit_at_zero, throughput_Q)
from .simulate import ImpulseEvent, Outcome, Trajectory, simulate
from .instance import InstanceFile, load_instance, loads_instance

__all__ = [
    "DomainError", "InfeasiblePathError", "NoPeriodicOrbit", "NoViableFraction",
    "NumericalError", "RegionError", "SCFError",
    "CustomMonotone", "ModelParams", "Monod", "ReactorState", "Region", "RegionGeometry",
    "RegionLabel", "V", "break_even", "classify_region", "g_map", "growth_rate", "impulse_map",
    "input_region", "lambdas", "pi_minus", "pi_plus", "validate_response",
    "DEFAULT_QUAD", "BatchSegment", "QuadratureSpec", "Terminal", "biomass_change",
    "biomass_profile", "integrate_batch", "minimum_biomass", "time_between",
    "OutcomePrediction", "Reason", "Verdict", "I_net", "N0", "N_bar", "X_threshold", "mu",
    "predict_outcome", "r_star", "region_geometry",
    "PeriodicOrbit", "ThroughputOptimum", "optimize_Q", "orbit_profile", "period_T",
    "periodic_orbit", "q_limit_at_zero", "throughput_Q",
    "ImpulseEvent", "Outcome", "Trajectory", "simulate",
    "InstanceFile", "load_instance", "loads_instance",
]
