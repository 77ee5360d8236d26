# # Binary witnesses against non-central containments
#
# The bounded order 0 < 1, 2 < 3. Each witness is monotone for it, yet breaks a
# central relation whose center holds the top, the bottom, or neither.

from kclones import Relation, find_violation, make_central, make_regular, HRegularFamily, preserves, binary_witness

order = Relation(4, 2, [(x, x) for x in range(4)] + [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)])

cases = [
    ("order_f", {}, make_central(4, 2, [3])),
    ("order_g", {}, make_central(4, 2, [0])),
    ("order_threshold", {"a": 1, "b": 1}, make_central(4, 2, [1])),
]
for kind, extra, sigma in cases:
    w = binary_witness(kind, 4, order=order, **extra)
    v = find_violation(w, sigma)
    print(f"{kind:16s} monotone={preserves(w, order)}  {v.columns} -> {v.image}")

# Central rho against an equivalence, a regular relation and a larger central
# relation: the star operations.

rho = make_central(4, 2, [0, 1])
eq = Relation(4, 2, [(x, x) for x in range(4)] + [(0, 1), (1, 0)])
star = binary_witness("equiv_star", 4, c1=0)
print("equiv", preserves(star, rho), find_violation(star, eq).to_doc())

reg = make_regular(HRegularFamily(4, 3, [[[0, 1], [2], [3]]]))
star = binary_witness("regular_star", 4, center=[0])
print("regular", preserves(star, make_central(4, 2, [0])), find_violation(star, reg).to_doc())

star = binary_witness("unary_central_star", 4, unary=[0])
print("unary", preserves(star, Relation(4, 1, [(0,)])), find_violation(star, make_central(4, 3, [0])).to_doc())
