"""Three-band equiripple rational approximation via elliptic and hyperelliptic maps."""
from .bands import BandSystem, normalize_bands
from .elliptic import EllipticModulus, inverse_x, modulus_from_t, theta, x_map
from .solutions import FilterSolution, classify, design, eval_solution, forward_construct, phase_shift
from .verify import VerificationReport, verify_solution
from .zolotarev import ZolotarevFraction, zolotarev

__all__ = [
    "BandSystem", "normalize_bands", "EllipticModulus", "inverse_x", "modulus_from_t", "theta",
    "x_map", "FilterSolution", "classify", "design", "eval_solution", "forward_construct",
    "phase_shift", "VerificationReport", "verify_solution", "ZolotarevFraction", "zolotarev",
]
