"""Multilevel lattice codes over the Hurwitz quaternion integers."""

from ._accel import USE_NUMBA, backend_name
from .construction import (
    LevelCodeSpec,
    PiACode,
    build_code,
    code_from_dict,
    encode,
    lattice_volume,
    load_code_spec,
    min_distance_estimate,
    rank_one_fixture,
)
from .crt import (
    CrtContext,
    IrreducibleFactor,
    build_crt_context,
    enumerate_residues,
    find_irreducible,
    phi_combine,
    phi_split,
    psi_combine,
    psi_split,
)
from .decoders import mld_decode, smd_decode
from .quaternion import HurwitzInt, gcd_bezout, mod_left_ideal, mod_two_sided, round_to_hurwitz

__version__ = "0.1.0"

__all__ = [
    "USE_NUMBA",
    "backend_name",
    "LevelCodeSpec",
    "PiACode",
    "build_code",
    "code_from_dict",
    "encode",
    "lattice_volume",
    "load_code_spec",
    "min_distance_estimate",
    "rank_one_fixture",
    "CrtContext",
    "IrreducibleFactor",
    "build_crt_context",
    "enumerate_residues",
    "find_irreducible",
    "phi_combine",
    "phi_split",
    "psi_combine",
    "psi_split",
    "mld_decode",
    "smd_decode",
    "HurwitzInt",
    "gcd_bezout",
    "mod_left_ideal",
    "mod_two_sided",
    "round_to_hurwitz",
]
