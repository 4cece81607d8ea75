"""Bianchi K-homology - exact equivariant K-homology of Bianchi groups from pruned Floege complexes."""

__version__ = "0.1.0"
