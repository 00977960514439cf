"""Desk-scale numerics for De Giorgi, Harnack and Hölder estimates of
non-local kinetic equations ``d_t f + v . grad_x f = L f + h``."""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
