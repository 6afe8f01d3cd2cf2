"""Numerical core: model, propagation, eigensolvers, zeros, continuation and checks."""
