"""
Figure datasets.

Each preset fixes the caption parameters and evaluates the closed forms on a
log grid in alpha (and beta_c for the heat maps).  The same data is written
by ``qengine figure <preset>``.
"""
import numpy as np

from qengine import cli
from qengine.engine import EngineKind

for name in cli.PRESETS:
    extra, cols, head, meta = cli.figure_data(name)
    n = sum(np.size(c["alpha"]) for c in cols.values())
    print("%s: %d rows" % (name, n))
    for line in head:
        print("   ", line)

# The raw columns are plain arrays, e.g. the q curves behind Fig4a
_, cols, _, _ = cli.figure_data("Fig4a")
for kind in EngineKind:
    q = cols[kind]["q_ctur"]
    alpha = cols[kind]["alpha"]
    inside = alpha[q < 2]
    print(kind.value, "q < 2 for alpha in [%.4g, %.4g]" % (inside.min(), inside.max()))
