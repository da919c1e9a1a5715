from ._core import (
    Instance,
    NumericError,
    Structure,
    ValidationError,
    b_eigen,
    build_full,
    build_low_energy,
    closed_tridiag_eigs,
    default_jzz,
    jxx_bounds,
    jzz_steer_bound,
    localization,
    m_matrix,
    make_gdis,
    make_gshare,
    negativity,
    parse_instance,
    run_cli,
    spectrum,
    v3_alpha_beta,
    write_instance,
)

__all__ = [
    "Instance",
    "NumericError",
    "Structure",
    "ValidationError",
    "b_eigen",
    "build_full",
    "build_low_energy",
    "closed_tridiag_eigs",
    "default_jzz",
    "jxx_bounds",
    "jzz_steer_bound",
    "localization",
    "m_matrix",
    "make_gdis",
    "make_gshare",
    "negativity",
    "parse_instance",
    "run_cli",
    "spectrum",
    "v3_alpha_beta",
    "write_instance",
]
