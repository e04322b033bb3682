"""siegellab: a numerical laboratory for entire maps with bounded type Siegel disks."""

from .maps import (ExpAffine, MapFamily, PointLattice, SingularData, Sine, ZExp,
                   inverse_branch, is_infinity, lambert_w)
from .rotation import (ContinuedFraction, GOLDEN_MEAN, cf_expand, convergents,
                       is_bounded_type)
from .siegel import (BoundaryOrbit, Linearizer, TaylorSeries, conjugacy_residual,
                     inner_radius, linearizer, measure_rotation_number, taylor_at,
                     trace_boundary)
from .pullback import (BranchPolicy, FixedBranch, JordanDiskApprox, NearestBranch,
                       PullbackChain, RandomBranch, chordal_diameter, chordal_distance,
                       lift_disk, pullback_chain, shrink_experiment)
from .hypgeom import (ArcInterval, CircleArc, HalfNeighborhood, SlitSphere,
                      angle_from_d, build_half_neighborhood, quasihyperbolic_distance,
                      slit_sphere_distance)
from .orbifold import (CoveringReport, OrbitPortrait, RamificationAssignment,
                       check_covering, compute_nu, pull_back_nu)
from .blaschke import Mobius, SymmetricModel, build_model, reflect, verify_symmetry
from .render import (Raster, TrapSpec, Window, classify_orbit, render_dynamical,
                     render_parameter, write_image)

__version__ = "0.1.0"
