# %% [markdown]
# A large bump does not change the census
#
# Add a smooth bump of height 1 supported in the ball of radius 2 around the
# origin of (A, x, y)-space.  At A1 = 20 the orbits sit far from the bump, so
# the horseshoe census is unchanged; the cascades still exist and stay
# disjoint.

# %%
from cascade_forge import FamilySpec, census_at_A1, geometry_for, theorem1_census

plain = FamilySpec(0.3)
bumped = FamilySpec.from_builtin(0.3, "compact-bump", magnitude=1.0, r=2.0)
print("beta estimate", round(bumped.beta, 4))

# %%
for spec in (plain, bumped):
    geo = geometry_for(spec, 20.0)
    rows, _ = census_at_A1(spec, geo, kmax=8)
    print([(r.found, r.nonflip) for r in rows])

# %%
geo = geometry_for(bumped, 20.0)
result = theorem1_census(bumped, geo, kmax=5, depth=3)
for c in result.cascades:
    print(f"{c.cycle.label():>6}  stem {c.stem_period}  periods {sorted(c.periods_seen)}  {c.unbounded_status}")
print("violations:", result.violations or "none")
