"""gamma-omega: exact computational group theory at desk scale.

Subpackages cover integer linear algebra on abelian groups, quadratic
functors, free-group word calculus, nilpotent quotient towers, group
homology of split extensions by cyclic groups, Milnor invariants of braid
closures, and the Whitehead-sequence bookkeeping tying them together.
"""

from .abelian import (
    AbMap,
    FgAbelianGroup,
    IntMatrix,
    from_relations,
    map_kernel_cokernel,
    smith_normal_form,
)

__all__ = [
    "AbMap",
    "FgAbelianGroup",
    "IntMatrix",
    "from_relations",
    "map_kernel_cokernel",
    "smith_normal_form",
]

__version__ = "0.1.0"
