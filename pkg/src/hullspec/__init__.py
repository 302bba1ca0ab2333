"""Spectra of covariant Schroedinger operators over subshifts, their periodic
approximations, and the finite groupoid algebras behind them."""
from .bloch import (BandSpectrum, Certificate, band_spectrum, bloch_vs_finite_volume, fiber,
                    hofstadter_fiber, hofstadter_spectrum)
from .groupoid import (ArrowFunction, Cocycle2, FiniteGroupoid, convolve, crossed_product,
                       pair_groupoid, reduced_norm, set_groupoid, spectrum_of_normal, star)
from .magnetic import FluxField, cocycle_from_flux, magnetic_assemble
from .schrodinger import OperatorSpec, assemble_finite, fibonacci_model, laplacian, validate
from .spectra import CompactRealSet, HermitianMatrix, hausdorff_distance
from .symdyn import (Subshift, convergent_approximants, fibonacci_subshift,
                     min_distance_to_periodic, periodic_subshift, point_hausdorff_distance,
                     splice_subshift, sturmian_subshift, subshift_distance)

__version__ = "0.1.0"

__all__ = [
    "ArrowFunction", "BandSpectrum", "Certificate", "Cocycle2", "CompactRealSet",
    "FiniteGroupoid", "FluxField", "HermitianMatrix", "OperatorSpec", "Subshift",
    "assemble_finite", "band_spectrum", "bloch_vs_finite_volume", "cocycle_from_flux",
    "convergent_approximants", "convolve", "crossed_product", "fiber", "fibonacci_model",
    "fibonacci_subshift", "hausdorff_distance", "hofstadter_fiber", "hofstadter_spectrum",
    "laplacian", "magnetic_assemble", "min_distance_to_periodic", "pair_groupoid",
    "periodic_subshift", "point_hausdorff_distance", "reduced_norm", "set_groupoid",
    "spectrum_of_normal", "splice_subshift", "star", "sturmian_subshift", "subshift_distance",
    "validate",
]
