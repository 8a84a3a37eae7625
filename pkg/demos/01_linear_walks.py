"""Two-photon quantum walks through a passive waveguide array.

Walks a pair of photons injected into a uniform lattice and shows how the
coincidence pattern evolves with the walk depth CL: the separable input
fills a square whose ballistic vertices march out at +-2CL, while the
path-entangled inputs lock into antibunched or bunched patterns.  The
Schmidt number stays pinned at its input value throughout: a passive
circuit rearranges correlations but cannot create entanglement.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from latwalk import InputSpec, LatticeSpec, correlation, propagate_linear, schmidt_number
from latwalk import stabilization_threshold_linear

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def walk(input_spec, cl):
    spec = LatticeSpec.uniform(3, 1.0, cl)
    return propagate_linear(input_spec, spec, mode="analytic_infinite")


def panel(ax, state, title):
    corr = correlation(state)
    half = 14
    i0 = state.index_of(0)
    window = corr.gamma_matrix[i0 - half:i0 + half + 1, i0 - half:i0 + half + 1]
    ax.imshow(window, origin="lower", extent=[-half, half, -half, half], cmap="inferno")
    ax.set_title(title, fontsize=9)
    ax.set_xlabel("idler waveguide")
    ax.set_ylabel("signal waveguide")


inputs = [
    ("separable |0,0>", InputSpec.separable_same_waveguide(0)),
    ("(|0,0>+|1,1>)/sqrt(2)", InputSpec.path_entangled_plus(0)),
    ("(|0,0>-|1,1>)/sqrt(2)", InputSpec.path_entangled_minus(0)),
]
depths = [0.3, 2.0, 5.0]

fig, axes = plt.subplots(3, 3, figsize=(10, 10), constrained_layout=True)
for row, (label, input_spec) in enumerate(inputs):
    for col, cl in enumerate(depths):
        panel(axes[row, col], walk(input_spec, cl), f"{label}, CL={cl}")
fig.suptitle("Linear-array walks: square pattern vs antibunching vs bunching")
fig.savefig(OUT / "linear_walks.png", dpi=150)
print(f"wrote {OUT / 'linear_walks.png'}")

print("\nSchmidt number along the walk (a passive circuit preserves it):")
for label, input_spec in inputs:
    ks = [schmidt_number(walk(input_spec, cl)) for cl in depths]
    print(f"  {label:24s} K = " + ", ".join(f"{k:.6f}" for k in ks))

print("\nPattern stabilization depths (smallest CL where the final shape locks in):")
for label, input_spec in inputs:
    cl_star = stabilization_threshold_linear(input_spec, 1.0)
    print(f"  {label:24s} CL* = {cl_star:.4f}")
