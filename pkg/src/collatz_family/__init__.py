"""Collatz map T, the conjugate family F_n, identity verifiers and generalized matrices."""
