# %% [markdown]
# The period-doubling cascade of the even fixed point
#
# Start from the nonflip fixed point at A1 = 20, follow it into decreasing A,
# and switch onto the doubled branch at every period-doubling point.

# %%
import numpy as np

from cascade_forge import FamilySpec, SymbolCycle, build_cascade, doubling_gaps, geometry_for, newton_solve, seed_points
from cascade_forge import io as cfio
from cascade_forge.horseshoe import a0_threshold

spec = FamilySpec(0.3)
geo = geometry_for(spec, 20.0)
anchor = newton_solve(spec, 20.0, seed_points(SymbolCycle((1,)), geo))
window = (a0_threshold(spec, geo) - 1.0, 20.0)

# %%
cascade = build_cascade(spec, anchor, window, depth=6, cycle=SymbolCycle((1,)))
print("periods", cascade.periods_along, "status", cascade.unbounded_status)
for e in cascade.doublings:
    print(f"period {e.orbit_at.k:3d} doubles at A = {e.A_star:.9f}")

# %%
# successive gaps shrink roughly geometrically; their ratios approach Feigenbaum's 4.669
gaps = doubling_gaps(cascade)
print(np.round(gaps, 7))
print(np.round(gaps[:-1] / gaps[1:], 3))

# %%
# closed forms for the first two doublings
B = spec.B
print(3 * (1 - B) ** 2 / 4, cascade.doublings[0].A_star)

# %%
# plot-ready polyline: arclength, A, period, first orbit point, multipliers, index
csv_text = cfio.branch_csv(cascade.segments)
print(csv_text.splitlines()[0])
print(len(csv_text.splitlines()) - 1, "rows")
