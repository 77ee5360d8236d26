"""k-ary parts of maximal clones on a finite set.

Relations and operation tables on ``{0..n-1}``, the Rosenberg relation
classes, the type calculus deciding ``Pol_k rho <= Pol_k sigma`` for central
``rho``, brute-force enumeration for small domains, and containment posets.
"""

from .domain import (BudgetError, InputError, OperationTable, Relation, ScopeError, Violation,
                     apply, find_violation, image_of_relation, preserves, projection, rel_contains)
from .oracle import EnumerationBudget, binary_witness, brute_containment, enumerate_polk
from .poset import ContainmentMatrix, build_poset, central_chain, export, load_matrix, verify_chain
from .rosenberg import (AbelianGroupStructure, CentralDecomposition, HRegularFamily, NotCentralError,
                        RosenbergClass, catalog, central_decompose, classify, group_structures,
                        is_central, make_affine, make_central, make_regular)
from .typecalc import (ContainmentVerdict, CriterionPass, Separation, TypePair, decide_containment,
                       empty_type_family, interpolant, theorem_predicate, type_leq, type_meet, type_of)

__version__ = "0.1.0"
