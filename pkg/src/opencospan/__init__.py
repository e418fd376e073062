"""Open systems as cospans: open Petri nets, rated nets and dynamical systems.

Systems with interfaces compose by gluing along shared variables (pushouts).
Semantics: token firing, mass-action kinetics, RK4 simulation and
steady-state black-boxing.
"""
from .cospan import (
    CospanMap,
    FinCospan,
    check_frobenius_laws,
    compose,
    frobenius_generators,
    identity_cospan,
    iso_cospan,
    tensor,
)
from .dynam import (
    OpenDynam,
    VectorField,
    compose_open_dynam,
    iota_dynam,
    open_residual,
    pushforward_field,
    tensor_open_dynam,
)
from .expr import Expr, Poly, canonical, equivalent, parse
from .finset import FinFunction, FinSet, coproduct, pushout
from .grayb import gray_box, mass_action, rate_equations
from .numsim import SteadySample, Trajectory, glue_steady_states, integrate, steady_states
from .petri import Multiset, OpenPetriNet, PetriMorphism, PetriNet, compose_open, tensor_open
from .rates import OpenRatedNet, RatedNet, compose_open_rated, tensor_open_rated
from .token import FiringSequence, fire, reachable, transport_firing

__version__ = "0.1.0"
