"""Moebius groups lifted to the projective plane through the Veronese representation."""

from .hermitian import (
    FUCHSIAN_FORM,
    HermitianForm3,
    boundary_quartic,
    chen_greenberg_sample,
    evaluate,
    invariant_hermitian_form,
    quartic_laplacian,
    real_projection_pi,
    signature,
    solve_invariant_hermitian,
    veronese_ball_census,
)
from .kulkarni import (
    TangentLineFamily,
    kulkarni_limit_lines,
    omega_membership,
    orbit_accumulation_p2,
    pseudo_limit_tangent_check,
)
from .moebius import (
    CircleSpec,
    GroupSpec,
    MoebiusMap,
    SchottkyError,
    classify,
    fixed_points,
    four_disk_schottky,
    genus2_octagon_group,
    invariant_circle,
    limit_set_p1,
    quasifuchsian_family,
    schottky_group,
)
from .projective import (
    ProjectiveError,
    ProjLine,
    ProjMap3,
    ProjPoint1,
    ProjPoint2,
    PseudoProjMap,
    chordal_distance,
    same_point,
)
from .veronese import iota, psi, psi_inverse, real_form_conjugator, tangent_line
