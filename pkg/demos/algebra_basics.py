"""Walk through the Lie-algebra layer: builtin specs, hypothesis checks,
the Killing form, and the cosmological constant.

Run with:  python3 demos/algebra_basics.py
"""

import numpy as np

from kkgeom import (LieAlgebraSpec, cosmological_constant, killing_form,
                    su2_algebra, u1_su2_algebra, validate_spec)

np.set_printoptions(precision=4, suppress=True)

# A split algebra is an abelian "base" block of dimension n glued to a fiber
# algebra of dimension r.  su2_algebra(2) is the workhorse: 2 central
# directions plus so(3)-type structure constants.
spec = su2_algebra(2)
print("su2 split algebra: n =", spec.n, " r =", spec.r, " N =", spec.N)

# validate_spec runs every structural hypothesis (bracket antisymmetry,
# Jacobi, central-block structure, ad-invariance and nondegeneracy of h).
report = validate_spec(spec)
for check in report.checks:
    print(f"  {check.name:32s} passed={check.passed}  "
          f"max violation {check.max_violation:.2e}")
print("unimodular:", report.unimodular)

# The Killing form of su(2) in this basis is -2 * identity.
print("\nKilling form of the fiber block:")
print(killing_form(spec))

# The cosmological constant comes from contracting the fiber structure
# constants against the inverse fiber metric.  For su(2) with k = I it is 3/4,
# and it scales like 1/lambda when the fiber metric is scaled by lambda.
print("\nLambda(su2, k=I)   =", cosmological_constant(spec))
for scale in (0.5, 2.0, 10.0):
    scaled = su2_algebra(2, k=scale * np.eye(3))
    print(f"Lambda(su2, k={scale:>4}I) =", cosmological_constant(scaled))

# Breaking a spec: give the bracket [g1, g2] a spurious g2 component.  The
# validator pinpoints the offending (1-based) indices.
c = spec.c.copy()
c[3, 3, 4] += 0.5
c[3, 4, 3] -= 0.5
bad = validate_spec(LieAlgebraSpec(spec.n, spec.r, c, spec.b, spec.k))
print("\nafter mutating the bracket:")
for check in bad.checks:
    if not check.passed:
        print(f"  FAILED {check.name}  worst indices {check.worst_indices}  "
              f"violation {check.max_violation:.3f}")

# u1_su2 stacks a u(1) factor in front of su(2); the product structure shows
# up as a block-diagonal fiber bracket.
prod = u1_su2_algebra(2)
print("\nu1_su2: r =", prod.r, " Lambda =", cosmological_constant(prod))
