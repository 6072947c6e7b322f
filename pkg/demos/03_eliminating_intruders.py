# coding: utf-8

# # Eliminating intruders
#
# Each engine takes a named real g (a code below a condition) and builds a new
# family member that meets g infinitely often, refining the condition by
# fusion rounds.  The traces print one line per recorded check.

from sacks_lab import fixtures
from sacks_lab.cofinitary import mcg_eliminate
from sacks_lab.families import CodedSet, FamilyInstance, ad_eliminate, builtin_type, ed_eliminate, is_intruder
from sacks_lab.formulas.semantics import EPReal
from sacks_lab.perms import EAPermutation
from sacks_lab.products import ProductCondition
from sacks_lab.words import Representation

top = ProductCondition.make({})

# ## Eventually different reals
#
# The family holds the constant 7.  The new real agrees with g at the top of
# every interval and avoids 7 everywhere else.

F = FamilyInstance((EPReal.constant(7),))
trace = ed_eliminate(F, top, fixtures.ed_fixture(), 2)
print("\n".join(trace.lines()))
print("new real:", trace.result)
print("still an intruder?", is_intruder(builtin_type("med"), trace.result, F))

# ## Almost disjoint sets
#
# The evens leave the odds free; the engine splits them and forces points
# of g into one half.

trace = ad_eliminate(FamilyInstance((CodedSet.residue_class(0, 2),)), top, fixtures.set_fixture(), 2)
print("\n".join(trace.lines()[-4:]))

# ## Cofinitary groups

rho = Representation.make({"a": EAPermutation.pair_swap()})
trace = mcg_eliminate(rho, top, fixtures.mcg_fixture(), 2)
for r in trace.rounds:
    print(r.word, r.f, r.agreements)
print(trace.lines()[-1])
