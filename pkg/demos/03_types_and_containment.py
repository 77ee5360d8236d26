# # Types of tuples and the containment criterion
#
# The type of a tuple with respect to an n-ary central relation records which
# n-element index sets land in the relation and which index pairs are equal.

from kclones import decide_containment, empty_type_family, interpolant, make_central, preserves, type_of

rho = make_central(4, 2, [0])
t = type_of(rho, (1, 0, 1))
print(sorted(t.tau1), sorted(t.tau2))

# Pol_2 of the 4-ary central relation sits inside Pol_2 of the 5-ary one on six
# elements. The search only compares distinct type signatures.

v = decide_containment(make_central(6, 4, [0]), make_central(6, 5, [0]), 2)
print(v.to_doc())

# Going the other way round fails, and the answer comes with a certificate: a
# binary operation preserving rho but not sigma.

rho, sigma = make_central(4, 2, [0]), make_central(4, 3, [0])
v = decide_containment(rho, sigma, 2)
cert = v.certificate
print("a =", cert.a_tuples, "b =", cert.b)
print(preserves(cert.operation, rho), preserves(cert.operation, sigma), cert.problems(rho, sigma))

# The interpolant can also be built by hand.

f = interpolant(make_central(3, 2, [0]), [(1, 1), (1, 2)], (2, 2))
print(f.table.reshape(3, 3))

# When the arity of rho is below 2k, members of sigma with an empty common type
# exist, which is what rules containment out.

sigma = make_central(5, 4, [0])
fam = empty_type_family(sigma, 3, 2)
ternary = make_central(5, 3, [0])
print(fam, (type_of(ternary, fam[0]) & type_of(ternary, fam[1])).is_empty())
