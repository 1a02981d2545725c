"""Free Lyapunov exponents, S-transforms and Fuglede-Kadison determinants."""

from ._core import (
    DomainError,
    InvalidMeasure,
    PreconditionError,
    SpectralMeasure,
    __version__,
    cauchy,
    compressed_mp_measure,
    discrete_measure,
    distribution_at,
    integrated_exponent,
    largest_exponent,
    log_det,
    marginal_exponent,
    mp_measure,
    newman_solve,
    point_mass,
    profile,
    psi,
    psi_inverse,
    run_cli,
    s_transform,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
