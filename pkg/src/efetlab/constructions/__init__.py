"""The explicit constructions: the cos(sqrt n) + 2 example, the subharmonic example, the density lemma."""
from .borel import borel_inverse, cos_sqrt_transform, g_factor_contour, phi_borel
from .combi import DensityWitness, combi_find, lemma_constants, minimum_radius, periodic_mask, recheck
from .subharmonic import (ClaimsReport, SubharmonicExample, claims_check, fd_laplacian, max_theta_margin,
                          proposition_report, riesz_density_fd, riesz_mass, riesz_mass_fd, u_eval)

__all__ = ["ClaimsReport", "DensityWitness", "SubharmonicExample", "borel_inverse", "claims_check",
           "combi_find", "cos_sqrt_transform", "fd_laplacian", "g_factor_contour", "lemma_constants",
           "max_theta_margin", "minimum_radius", "periodic_mask", "phi_borel", "proposition_report",
           "recheck", "riesz_density_fd", "riesz_mass", "riesz_mass_fd", "u_eval"]
