"""Reading a 3D grid through frequency, CMI and contrast matrices.

Frequency shows raw slice counts. CMI splits the slice's mutual information
into signed per-cell contributions (positive = interaction excess, negative
= deficit). Contrast compares one target part's joint view of two other
variables against the global one.
"""

import numpy as np

import gridclust as gc

# Three variables; the (user, place) interaction flips with the period.
cells = np.array([
    [[0.30, 0.04], [0.04, 0.12]],   # period 0: users 0 <-> places 0
    [[0.04, 0.22], [0.20, 0.04]],   # period 1: reversed
])
spec = gc.PlantSpec(
    variables=(gc.PlantVariable("period", "categorical", 2, 2),
               gc.PlantVariable("user", "categorical", 2, 3),
               gc.PlantVariable("place", "categorical", 2, 3)),
    n_records=20000, seed=23, cells=cells / cells.sum())
dataset, truth = gc.generate(spec)
report = gc.vns_optimize(dataset, gc.OptimizerConfig(seed=2, vns_rounds=5))
model = report.best_model
print(f"optimum shape: {model.shape}\n")


def show(matrix):
    width = max(len(l) for l in matrix.row_labels) + 2
    print(f"{matrix.kind} ({matrix.row_variable} x {matrix.col_variable})"
          + (f", selection {dict(matrix.selection)}" if matrix.selection else "")
          + (f", target {matrix.target}" if matrix.target else ""))
    for label, row in zip(matrix.row_labels, matrix.values):
        cells = " ".join(f"{x:9.4f}" if matrix.kind != "frequency"
                         else f"{int(x):9d}" for x in row)
        print(f"  {label:{width}s} {cells}")
    print(f"  total = {matrix.total:.4f}\n")


for part in range(model.J(0)):
    show(gc.frequency_matrix(model, "user", "place",
                             selection={"period": part}))
    show(gc.cmi_matrix(model, "user", "place", selection={"period": part}))

print("contrast of each period against the global (user x place) view:")
for part in range(model.J(0)):
    show(gc.contrast_matrix(model, "period", part, "user", "place"))
