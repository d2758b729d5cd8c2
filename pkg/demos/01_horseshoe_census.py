# %% [markdown]
# Counting orbits in the Hénon horseshoe
#
# At a large parameter A1 every periodic orbit of the Hénon map lives in two
# vertical strips and is labelled by a cyclic word over {+1, -1}.  We solve
# for one orbit per word and compare the counts with the two-shift.

# %%
from cascade_forge import FamilySpec, census, census_at_A1, certify, geometry_for

spec = FamilySpec(0.3)
geo = geometry_for(spec, 20.0)
print(geo.to_dict())

# %%
# the sampled horseshoe checks, with the worst slack of each inequality
report = certify(spec, geo, A0=-15.0, grid=300)
for key in ("f1", "f3", "cone", "a0"):
    print(key, getattr(report, key + "_ok"), round(getattr(report, key + "_margin"), 4))

# %%
rows, orbits = census_at_A1(spec, geo, kmax=8)
print(" k  found  expected  nonflip  even")
for r in rows:
    print(f"{r.k:2d}  {r.found:5d}  {r.expected_orbits:8d}  {r.nonflip:7d}  {r.expected_even:4d}")

# %%
# even cycles (an even number of -1 symbols) are exactly the nonflip orbits
for cycle, orbit in sorted(orbits.items(), key=lambda kv: (kv[0].k, kv[0].word))[:8]:
    print(f"{cycle.label():>4}  flip={orbit.flip!s:5}  multipliers={[round(m.real, 3) for m in orbit.multipliers]}")

# %%
print([census(k).even_orbits for k in range(1, 13)])
