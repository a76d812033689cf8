"""Forested graph chain complexes for the rational homology of Out(F_n)."""

from .chain import ChainBasis, ClassStore, SparseIntMat, boundary_contract, boundary_remove, build_chain_basis
from .cycleio import CycleVector, parse_cycle, serialize_cycle, verify_cycle
from .enumerator import EnumSpec, ResourceCapError, enumerate_graphs, pairing_classes
from .exactla import DEFAULT_PRIMES, FieldSpec, NullspaceBasis, nullspace_of, rank_of
from .forests import ForestedGraph, ForestIndex, SignedRef, forest_basis, normalize
from .multigraph import (
    GraphClass,
    GraphFacts,
    Multigraph,
    canonical_form,
    classify,
    contract_edges,
)
from .pipeline import (
    RankProfile,
    compute_rank_profile,
    homology_dimensions,
    oracle_full_complex,
)

__all__ = [
    "ChainBasis",
    "ClassStore",
    "CycleVector",
    "DEFAULT_PRIMES",
    "EnumSpec",
    "FieldSpec",
    "ForestIndex",
    "ForestedGraph",
    "GraphClass",
    "GraphFacts",
    "Multigraph",
    "NullspaceBasis",
    "RankProfile",
    "ResourceCapError",
    "SignedRef",
    "SparseIntMat",
    "boundary_contract",
    "boundary_remove",
    "build_chain_basis",
    "canonical_form",
    "classify",
    "compute_rank_profile",
    "contract_edges",
    "enumerate_graphs",
    "forest_basis",
    "homology_dimensions",
    "normalize",
    "nullspace_of",
    "oracle_full_complex",
    "pairing_classes",
    "parse_cycle",
    "rank_of",
    "serialize_cycle",
    "verify_cycle",
]

__version__ = "0.1.0"
