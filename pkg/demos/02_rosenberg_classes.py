# # Recognising Rosenberg relations
#
# classify() reports every class a relation belongs to, with the parameters that
# identify it.

from kclones import AbelianGroupStructure, OperationTable, Relation, catalog, central_decompose, classify, make_affine

chain = Relation(3, 2, [(x, y) for x in range(3) for y in range(3) if x <= y])
cycle = Relation(3, 2, [(0, 1), (1, 2), (2, 0)])
for rel in (chain, cycle, Relation.diagonal(3)):
    print([c.to_doc() for c in classify(rel)])

# The affine relation of Z_3: x + y = u + v.

z3 = AbelianGroupStructure(OperationTable(3, 2, [(x + y) % 3 for x in range(3) for y in range(3)]))
lam = make_affine(z3)
print(len(lam), classify(lam)[0].params["p"])

# A central relation splits into its central part, its reflexive part and its tail.

rho = Relation(4, 2, [(x, x) for x in range(4)] + [(0, x) for x in (1, 2, 3)] + [(x, 0) for x in (1, 2, 3)]
               + [(1, 2), (2, 1)])
dec = central_decompose(rho)
print("center", sorted(dec.center), "tail", sorted(dec.tail))

# Everything on three elements, up to arity 4.

for entry in catalog(3, 4):
    print(f"{entry.label:14s} {entry.tag:22s} {len(entry.relation)} tuples")
