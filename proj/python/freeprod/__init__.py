"""Certified numerics for reduced free products of finite-dimensional
C*-algebras: truncated Fock-space representations, Khintchine-type norm
verification, certified operator-norm enclosures, free-group inequality
checks, and Schur-multiplier cb-norms."""

from freeprod._core import (  # noqa: F401
    Algebra,
    Family,
    FreeElement,
    FreeprodError,
    GroupBall,
    __version__,
    adjoint,
    bernoulli_family,
    bernoulli_symbol,
    cb_norm,
    ed_norm,
    element_from_terms,
    enclose_norm,
    fock_dim,
    free_state,
    generate_element,
    haagerup_check,
    homogeneous_part,
    leinert_check,
    letter_element,
    multiply,
    poisson,
    polarize,
    radial_symbol,
    represent_dense,
    run_config,
    scalar_element,
    stagnation_profile,
    truncate_degree,
    truncated_norm,
    truncated_poisson_bound,
    verify_kd,
)
