"""
deltajet - arithmetic differential calculus with p-derivations.

p-adic numbers with their Fermat quotient, δ-polynomials and arithmetic jet
spaces, δ-characters of formal groups and elliptic curves, δ-linear equations
on matrices, Witt vectors and δ-Fourier series. Everything is exact up to a
stated p-adic precision and series truncation.
"""

__version__ = "0.1.0"

from .config import DEFAULTS, Settings
from .deltapoly import (
    DeltaPoly,
    DeltaRing,
    c_p,
    delta,
    delta_iterates,
    is_variational_symmetry,
    phi,
    prolong_derivation,
)
from .dlinear import (
    DeltaFlow,
    DeltaMatrix,
    QuadraticMapData,
    check_flow_compatibility,
    delta_galois_group,
    ldelta,
    plus_delta,
    solve_delta_linear,
    solve_flow,
    star_delta,
)
from .dseries import (
    DeltaSeries,
    NewformData,
    delta_on_series,
    f1_series,
    fsharp_expansion,
    hecke_pTm,
    u_operator,
)
from .errors import DeltaJetError
from .groups import (
    EllipticCurveData,
    count_points_ap,
    elliptic_delta_character,
    gm_delta_character,
    kernel_law,
    psi_star,
)
from .jetspace import SchemePresentation, build_jet, ideal_membership_mod_p, jet_of_point
from .manifest import RunManifest
from .padic import PadicCtx, PadicElem, fermat_quotient, frobenius, teichmuller
from .witt import (
    WittVector,
    comonad_map,
    ghost,
    w1_hom_check,
    witt_add,
    witt_mul,
    witt_presentation,
)

__all__ = [
    "DEFAULTS",
    "Settings",
    "DeltaJetError",
    "PadicCtx",
    "PadicElem",
    "fermat_quotient",
    "teichmuller",
    "frobenius",
    "DeltaRing",
    "DeltaPoly",
    "phi",
    "delta",
    "delta_iterates",
    "c_p",
    "prolong_derivation",
    "is_variational_symmetry",
    "SchemePresentation",
    "build_jet",
    "jet_of_point",
    "ideal_membership_mod_p",
    "EllipticCurveData",
    "kernel_law",
    "gm_delta_character",
    "elliptic_delta_character",
    "psi_star",
    "count_points_ap",
    "DeltaMatrix",
    "DeltaFlow",
    "QuadraticMapData",
    "plus_delta",
    "star_delta",
    "ldelta",
    "solve_delta_linear",
    "delta_galois_group",
    "check_flow_compatibility",
    "solve_flow",
    "WittVector",
    "ghost",
    "witt_add",
    "witt_mul",
    "witt_presentation",
    "w1_hom_check",
    "comonad_map",
    "DeltaSeries",
    "NewformData",
    "delta_on_series",
    "f1_series",
    "fsharp_expansion",
    "hecke_pTm",
    "u_operator",
    "RunManifest",
]
