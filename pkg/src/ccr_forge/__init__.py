"""
Twisted Crossed-Product Workbench

Finite groups, finite-dimensional C*-algebras, twisting pairs and projective
actions, their crossed products, Weyl relations and sampled CCR phases.
"""

__version__ = "0.1.0"

# Core exports
from ccr_forge.config_manager import ConfigManager, VerificationSettings, parse_spec
from ccr_forge.crossed_product import CrossedProduct, crossed_product
from ccr_forge.cstar_algebra import AlgebraElement, AlgebraShape, Automorphism
from ccr_forge.engine import VerificationEngine
from ccr_forge.finite_group import FiniteGroup, build_group
from ccr_forge.projective_action import CField, ProjectiveAction, action_from_pair
from ccr_forge.reports import AxiomReport
from ccr_forge.twisting import TwistingPair, pair_from_tables

__all__ = [
    "AlgebraElement",
    "AlgebraShape",
    "Automorphism",
    "AxiomReport",
    "CField",
    "ConfigManager",
    "CrossedProduct",
    "FiniteGroup",
    "ProjectiveAction",
    "TwistingPair",
    "VerificationEngine",
    "VerificationSettings",
    "action_from_pair",
    "build_group",
    "crossed_product",
    "pair_from_tables",
    "parse_spec",
]
