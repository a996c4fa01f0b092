"""wforge: exact simplicial constructions and their invariants.

Complexes, PL maps of prescribed degree, Whitehead maps, mapping cylinders,
Hopf/Whitehead linking invariants in exact rational arithmetic, and the
compilation of quadratic Diophantine systems into simplicial-map extension
instances.
"""

from .complexes import (
    Complex,
    GeometricComplex,
    ProductSphere,
    SubcomplexRef,
    Subdivision,
    complete_complex,
    disk_complex,
    geometric_disk,
    geometric_sphere,
    geometric_wedge,
    make_complex,
    product_sphere,
    quotient_collapse,
    sphere_complex,
    subcomplex,
    subdivide_edge,
    wedge,
)
from .homology import (
    HomologyProfile,
    IntegerChain,
    bound_cycle,
    boundary_matrix,
    collapse_core,
    fundamental_cycle,
    homology_groups,
    point_profile,
    profile_of_sphere,
    smith_normal_form,
)
from .plmaps import (
    PLMap,
    SimplicialMap,
    compose_refined,
    degree_map,
    pinch_sum,
    simplicial_approximation,
    validate_simplicial_map,
    winding_family,
)
from .invariants import (
    PolytopalCycle,
    RegularValue,
    composite_invariant,
    degree_of,
    hopf_like,
    linking_number,
    linking_number_ambient,
    preimage_cycle,
    regular_values,
    schlegel_transfer,
)
from .cylinder import CylinderTriple, double_cylinder, glue_over, mapping_cylinder
from .whitehead import (
    WhiteheadSpec,
    product_map,
    wedge_assembly,
    wedge_hat,
    whitehead_family,
)
from .reduction import (
    DiophantineSystem,
    ExtensionInstance,
    compile_instance,
    oracle_solve,
    verify_instance,
    witness_extension,
)

__all__ = [n for n in dir() if not n.startswith("_")]
__version__ = "0.1.0"
