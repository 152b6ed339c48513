"""Exact permutation-orbifold formal calculus and fusion."""
