"""holocur: monodromy, central extensions and coadjoint orbits of
holomorphic matrix currents on punctured spheres."""

__version__ = "0.1.0"

from .surface import (  # noqa: F401
    Annulus,
    Contour,
    Disc,
    RationalFunction,
    SurfaceModel,
    basis_one_forms,
    canonical_generators,
    chart_cover,
    circle,
    segment,
    winding_number,
)
from .liealg import (  # noqa: F401
    algebra_element,
    adjoint,
    bracket,
    cartan_projectors,
    group_element,
    group_exp,
    killing_form,
    killing_form_adtrace,
    simultaneous_conjugacy_test,
    trace_word_invariants,
)
from .currents import (  # noqa: F401
    AlgebraCurrent,
    GroupCurrent,
    LoopCurrent,
    OneForm,
    gauge_act,
    log_derivative,
    mc_residual,
    restrict_to_loop,
)
from .transport import (  # noqa: F401
    contour_integral,
    evolve,
    frenkel_monodromy,
    integrate_form,
    period_map,
    transition_functions,
)
from .orbits import (  # noqa: F401
    CentExtElement,
    CoadjointPoint,
    OrbitCertificate,
    check_stabilizer,
    classify_orbit,
    coadjoint_act,
    adjoint_act,
    cocycle_omega_sigma,
    kks_form,
    pairing,
    same_orbit,
)
