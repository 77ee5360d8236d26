# # Relations, operations and preservation
#
# Elements of the domain are 0..n-1. A relation is a set of tuples; an
# operation is a flat table indexed by its arguments in lexicographic order.

import numpy as np

from kclones import OperationTable, Relation, find_violation, make_central, preserves, projection

# A binary central relation on three elements with center {0}: the diagonal plus
# every pair containing 0.

rho = make_central(3, 2, [0])
print(sorted(rho.tuples()))

# Projections preserve everything.

print(preserves(projection(3, 2, 1), rho))

# The swap 1 <-> 2 fixes 0, so it maps rho into itself.

swap = OperationTable(3, 1, [0, 2, 1])
print(preserves(swap, rho))

# Binary max does not: (0, 2) and (1, 0) are in rho, but max applied row by row
# gives (1, 2), which is not.

mx = OperationTable.from_function(3, 2, max)
v = find_violation(mx, rho)
print(v.columns, "->", v.image)

# Large central relations never need to be written out. Membership is answered
# from the center and the tail alone.

big = make_central(12, 9, [0], budget=10**6)
print(big.is_explicit, (1, 2, 3, 4, 5, 6, 7, 8, 0) in big, (1, 2, 3, 4, 5, 6, 7, 8, 9) in big)

# Batch membership works on arrays of tuples.

print(rho.contains_array(np.array([[0, 2], [1, 2], [2, 2]])))
