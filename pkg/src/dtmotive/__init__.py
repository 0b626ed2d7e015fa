"""Exact motivic DT series for quivers whose potential has a linear factor.

Reduced-space classes come from point counts over F_q (or a validated
closed form), and the framed DT series is then read off in the quantized
torus of the quiver.
"""

from .dsl import ParseError, SourceSpec, builtin, load_spec, parse, parse_file
from .dt import DTResult, dt_via_inversion, dt_via_recursion, r_series, verify_recursion_identity
from .motive import L, ONE, ZERO, MotiveClass, euler_characteristic, gl_class, grassmannian_class
from .oracles import colored_partition_counts, orbifold_product_series, register_commuting_plugin
from .pipeline import run_dt
from .quiver import Arrow, LinearPotential, Quiver, euler_form
from .reduced import EngineConfig, compute_reduced, reduced_motive
from .series import Region, TwistedSeries

__all__ = [
    "Arrow",
    "DTResult",
    "EngineConfig",
    "L",
    "LinearPotential",
    "MotiveClass",
    "ONE",
    "ParseError",
    "Quiver",
    "Region",
    "SourceSpec",
    "TwistedSeries",
    "ZERO",
    "builtin",
    "colored_partition_counts",
    "compute_reduced",
    "dt_via_inversion",
    "dt_via_recursion",
    "euler_characteristic",
    "euler_form",
    "gl_class",
    "grassmannian_class",
    "load_spec",
    "orbifold_product_series",
    "parse",
    "parse_file",
    "r_series",
    "reduced_motive",
    "register_commuting_plugin",
    "run_dt",
    "verify_recursion_identity",
]
