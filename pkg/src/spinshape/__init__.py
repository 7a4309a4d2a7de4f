"""Spin-1/2 particle in shape-invariant scalar and magnetic fields."""
