"""Reflex-edge guarding of 2-reflex orthogonal polyhedra."""
