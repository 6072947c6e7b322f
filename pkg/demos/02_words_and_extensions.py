# coding: utf-8

# # Words, fixpoints and one-point extensions
#
# Letters of the alphabet act as eventually affine permutations of the
# naturals; the extra letter x acts as a finite partial injection.  We split
# a word into a nice form and then extend x by one point without changing
# any fixpoints.

from sacks_lab.cofinitary import bound_M, extend_domain, extend_range, verify_preserved
from sacks_lab.perms import EAPermutation, PartialInjection
from sacks_lab.words import Representation, fix_report, split_to_nice, word

tau = EAPermutation.pair_swap()
rho = Representation.make({"a": tau})

# ## Rotating to a nice word

print(split_to_nice(rho, word("x a x")))

# If x is also the pair swap, a x is the identity and fixes everything.

print(fix_report(rho.with_x(tau), word("a x"), 8))

# ## Extending the domain
#
# With x = {0->1} and the word a x, any new value from M on keeps the
# fixpoints of a x unchanged.

s = PartialInjection.make({0: 1})
W0 = [word("a x")]
print("M =", bound_M(rho, s, W0, 2))
cert = extend_domain(rho, s, W0, 2)
print(cert.check().line())

# A value below M can go wrong: 2 -> 3 makes 2 a new fixpoint.

print("2->3 preserves:", verify_preserved(rho, s, s.extend(2, 3), W0, 256))

# ## Extending the range
#
# The range case runs the domain case on the inverse with x and x^-1 swapped.

print(extend_range(rho, s, W0, 2).check().line())
