# # Ground truth by enumeration
#
# On three elements every binary table can be checked: there are 3^9 of them.

from kclones import EnumerationBudget, BudgetError, Relation, brute_containment, enumerate_polk, make_central

print(enumerate_polk(Relation.diagonal(3), 2).count)
print(enumerate_polk(Relation(3, 1, [(0,)]), 2).count)
print(enumerate_polk(Relation(3, 1, [(0,), (1,)]), 1).count)

# A unary map preserving the central relation but breaking the equivalence {0,1}{2}.
# The first such table in lexicographic order is returned.

rho = make_central(3, 2, [0])
eq = Relation(3, 2, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)])
v = brute_containment(rho, eq, 1)
print(v.to_doc())

# Four elements and k = 2 means 4^16 tables; the oracle refuses up front.

try:
    brute_containment(make_central(4, 2, [0]), make_central(4, 3, [0]), 2)
except BudgetError as exc:
    print("refused:", exc)

# A negative answer can still be checked there, through a verified certificate.

v = brute_containment(make_central(4, 2, [0]), make_central(4, 3, [0]), 2, delegate=True)
print(v.contained, v.method)

# Budgets are explicit.

print(EnumerationBudget(max_tables=10**5, max_seconds=5))
