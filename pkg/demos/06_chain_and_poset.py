# # The chain of central relations and containment posets
#
# On eight elements with k = 2 the central relations of arities 4..7 sharing the
# center {0} give a strictly increasing chain of binary parts.

from kclones import build_poset, catalog, central_chain, export, verify_chain

chain = central_chain(8, 2)
report = verify_chain(chain, 2)
print("ok", report.ok, "height", report.height, "edges", report.edges)
for link in report.links:
    print(f"  {link.lower} < {link.upper}: criterion forward={link.forward_criterion} "
          f"reverse={link.reverse_criterion}")

# The same relations as a poset, in DOT.

print(export(build_poset(chain, 2), "dot"))

# All Rosenberg relations on three elements up to arity 2, compared by their
# unary parts. Converse orders and inverse cycles collapse into single nodes.

matrix = build_poset([e.relation for e in catalog(3, 2)], 1)
hasse = matrix.hasse()
print(len(hasse), "parts,", hasse.number_of_edges(), "covering pairs")
for v in hasse.nodes:
    print("  ", hasse.nodes[v]["label"])
