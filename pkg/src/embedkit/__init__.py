"""Decide continuous embeddings between weighted Besov/Triebel-Lizorkin spaces.

Submodules:

* :mod:`embedkit.weights`  weight families, cube measures, A_p diagnostics
* :mod:`embedkit.dyadic`   dyadic lattice, windows, slope fits
* :mod:`embedkit.criteria` discrete criteria, closed forms and the decision procedure
* :mod:`embedkit.oracle`   FFT Littlewood-Paley norms and atom probes
* :mod:`embedkit.cli`      command line front end
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .dyadic import Box, DyadicCube, IndexWindow, Region, SlopeFit, fit_log_slope
from .weights import (
    Circle3D, Constant, Custom, DistancePower, PartialRadialPower, ProductPower, RadialPower, Sphere,
    Membership, ap_membership_closed_form, ap_quantity, cube_measure, estimate_ap_constant, eval_weight,
    multiply,
)
