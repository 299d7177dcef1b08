"""
Reliability projections from published variance components
===========================================================

Feed the published G-study estimates for the three student groups into the
D-study and look at how reliability grows with items and occasions.
"""

# %%
from gtheory.dstudy import dstudy_grid, format_table, g_coefficient
from gtheory.published import CORRECTED, PRINTED

white = PRINTED["white"]
cells = dstudy_grid(white, [2, 3, 4, 5], [2, 3, 4, 5], paired=True)
print(format_table(white, cells, title="White students"))

# %%
# The Asian American set prints its person x item and item x occasion rows
# transposed. Only the swapped labelling reproduces the printed reliabilities.
for name, vc in (("printed", PRINTED["asian"]), ("swapped", CORRECTED["asian"])):
    diag = [g_coefficient(vc, n, n) for n in (2, 3, 4, 5)]
    print(f"{name:>8}: " + "  ".join(f"{g:.3f}" for g in diag))
print("published:  0.231  0.380  0.498  0.587")

# %%
# Plot-ready long format: one row per (occasions, items) cell for each group.
print("group,n_occasions,n_items,g_coefficient")
for group, vc in CORRECTED.items():
    for c in dstudy_grid(vc, range(1, 6), range(1, 9)):
        print(f"{group},{c.n_occasions},{c.n_items},{c.g_coefficient:.4f}")
