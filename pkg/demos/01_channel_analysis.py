"""Rate bounds of a two-user channel, two ways.

A channel that draws one of the five subspaces of GF(2)^2 uniformly and
reveals the matching linear image of the input admits closed-form rate
bounds (weighted projected dimensions).  The same numbers must fall out of
the explicit probability table; this script prints both.
"""

from macpolar import LinearComboMac, mutual_info, rate_region
from macpolar.linear_mac import binary2_subspaces

subs = binary2_subspaces()
combo = LinearComboMac(2, 2, [(0.2, s) for s in subs])
explicit = combo.to_explicit()

print("five-component channel over GF(2)^2, uniform weights")
for users in ([1], [2], [1, 2]):
    closed = combo.mutual_info(users)
    table = mutual_info(explicit, users)
    print(f"  I{set(users)}: closed form {closed:.6f}   table {table:.6f}")

region = rate_region(combo)
print("rate-region constraints:")
for users, bound in region.constraints:
    print(f"  sum of rates over {set(users)} <= {bound:.4f}")
print("pentagon vertices:",
      [(round(float(x), 4), round(float(y), 4)) for x, y in region.vertices])
print("dominant face:",
      [(round(float(x), 4), round(float(y), 4)) for x, y in region.dominant_face])
