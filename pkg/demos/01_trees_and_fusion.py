# coding: utf-8

# # Conditions, splitting levels and fusion
#
# A condition is a finite binary tree with the full tree glued above each
# leaf.  This walk-through builds a few, lists their splitting levels, and
# then runs a short fusion chain on a product of three of them.

import random

from sacks_lab import products as P
from sacks_lab import trees
from sacks_lab.generators import random_fusion_chain
from sacks_lab.products import ProductCondition
from sacks_lab.trees import TreeCondition

# ## One tree
#
# The leaves "00" and "1" give a stem of length 0 whose left side only
# continues through "00".

T = TreeCondition.from_leaves(["00", "1"])
for n in range(3):
    print(f"spl_{n}:", " ".join(s or "ε" for s in trees.split_level(T, n)))

# Restricting to a node keeps everything comparable with it.

print("restricted to 1:", trees.restrict_node(T, "1"))
print("below T:", trees.leq(trees.restrict_node(T, "1"), T))

# ## Suitable functions
#
# At level n a suitable function picks one successor of every level-n
# splitting node on each coordinate of F.  The restrictions form a maximal
# antichain below p.

p = ProductCondition.make({0: T, 1: TreeCondition.full()})
sigmas = P.suitable_functions(p, [0, 1], 1)
print(len(sigmas), "suitable functions at n=1")
print("maximal antichain:", P.check_antichain(p, [0, 1], 1))

# ## A fusion chain
#
# Each step refines every cell of the current antichain and glues the
# pieces back together, so splitting level k survives from step k on.

chain, Fs = random_fusion_chain(random.Random(7), length=5)
for k, q in enumerate(chain):
    print(k, q)
print("fusion verified:", P.verify_product_fusion(chain, Fs).ok)
