"""Numerical services: linear algebra, contraction completion, Cayley maps, extensions."""
