"""Cayley balls and the word problem in three reduction regimes.

Walks through the free group, the genus-2 surface group (small cancellation,
Dehn's algorithm), and a direct product of free groups (confluent rewriting),
showing how normal forms, ball enumeration, and word distances behave in each.
"""

from l1comb import GroupPresentation, ball, multiply, reduce_word, word_distance

print("=== free group on a, b ===")
f2 = GroupPresentation(("a", "b"))
print("reduce aAbB       ->", repr(reduce_word("aAbB", f2)))
print("multiply ab * Ba  ->", repr(multiply("ab", "Ba", f2)))
b = ball(f2, 5)
print("sphere sizes      ->", b.sphere_sizes(), "(4 * 3^(n-1) per sphere)")
print("d(e, abab)        ->", word_distance("", "abab", f2, 8))

print()
print("=== genus-2 surface group, relator abABcdCD, Dehn's algorithm ===")
surface = GroupPresentation(("a", "b", "c", "d"), ("abABcdCD",), "dehn")
print("relator reduces   ->", repr(reduce_word("abABcdCD", surface)))
print("long subword      -> abABc becomes", repr(surface.dehn_reduce("abABc")))

# greedy reduction alone cannot see that the two relator halves agree, so
# ball enumeration settles element identity with the triviality oracle
print("abAB == dcDC      ->", surface.elements_equal("abAB", "dcDC"))
bs = ball(surface, 4)
print("sphere sizes      ->", bs.sphere_sizes(), "(eight pairs merge at radius 4)")
idx = bs.canonical_index("dcDC")
print("canonical of dcDC ->", repr(bs.elements[idx]))

print()
print("=== product of two free groups, shortlex rewriting system ===")
rules = tuple((x + y, y + x) for x in "cCdD" for y in "aAbB")
product = GroupPresentation(
    ("a", "b", "c", "d"), ("acAC", "adAD", "bcBC", "bdBD"), "rewriting", rules
)
print("normal form of ca ->", repr(product.normal("ca")))
print("relator acAC      ->", repr(product.normal("acAC")))
print("sphere sizes      ->", ball(product, 3).sphere_sizes())
