"""Mixed classical/fractional-time diffusion on bounded domains.

Thin wrapper over the compiled core: grids and fields, the diffusion
operator menu, the memory-carrying time integrator, Mittag-Leffler
barriers, and decay-rate fitting.
"""

from ._core import (  # noqa: F401
    DecayFit,
    Field,
    Grid,
    IdentityReport,
    NormTrace,
    Normalization,
    PredictedDecay,
    ScalarTrajectory,
    apply_operator,
    barrier_mixed,
    bump_field,
    check_identity,
    eigenfunction_field,
    energy_integral,
    fit_decay,
    gagliardo_seminorm_sq,
    gradient_sq_norm,
    lp_norm,
    mittag_leffler,
    predicted_rate,
    random_field,
    riesz_convolution,
    simulate,
    solve_scalar_ode,
)
