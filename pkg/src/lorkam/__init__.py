"""Numerical toolkit for Lorentzian distance, cut loci, Aubry sets and the
regularized Lax-Oleinik evolution on model globally hyperbolic spacetimes."""

from .spacetime import (CausalClass, SpacetimeSpec, WarpProfile, causal_class,
                        cylinder, hamiltonian, lagrangian, legendre,
                        legendre_inverse, lorentz_norm, make_profile,
                        minkowski, reference_distance, spec_from_config,
                        spec_to_config, tabulated_profile, warped, wrap_angle)
from .geodesic import (ConjugateResult, GeodesicRecord, JacobiRecord, exp_map,
                       first_conjugate_time, integrate_geodesic,
                       jacobi_transport)
from .distance import (ConnectOptions, Maximizer, MaximizerSet, action_cost,
                       connect, curve_action, lorentz_distance, relation,
                       relation_d_batch, superdiff_action)
from .cutlocus import (AubryVerdict, CutClassification, CutResult, NUResult,
                       classify_cut, cut_time, in_future_aubry, is_nu)
from .laxoleinik import (LOOptions, RegularizedValue, SandwichReport,
                         SmoothingResult, f_bar, f_map, regularized_value,
                         sandwich_check, value_field)
from .homotopy import (PairBounds, RetractionTrace, beta_value,
                       cut_to_nu_step, phi_bounds, retract_pair,
                       retract_point, sample_trace)
from .kernels import BACKEND
from . import errors, oracles, verify

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
