# %% [markdown]
# The singular integrals behind the integrability bound
#
# M(z) = int dm(w) / |z - w| equals 4 E(|z|^2) with E the complete elliptic
# integral of the second kind; it falls from 2 pi at the centre to 4 on the rim.

# %%
import numpy as np
from scipy.special import ellipe

import calabi_rotation as cr

r = np.array([0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0])
print(np.c_[r, cr.singular_mass(r), 4 * ellipe(r ** 2)])

# %% Cauchy-Pompeiu on a Hamiltonian: the boundary term drops out
H = cr.moving_bump()
f = cr.hamiltonian_at(H, 0.3)
for w in (0.0, 0.3 + 0.2j, 0.45j):
    res = cr.cauchy_pompeiu(f, w)
    print(w, res.boundary_term, res.area_term, f.value(w))

# %% integrating the area term over w recovers int H dm
lhs, rhs = cr.cauchy_calabi_identity(H, 0.3)
print(lhs, rhs)

# %% the chain of bounds at t = 0.5
chk = cr.lemma1_bound_check(H, 0.5, 20000, cr.substream(1))
print(f"{chk.estimate:.4f} +- {chk.standard_error:.4f} <= {chk.intermediate:.4f} <= {chk.majorant:.4f}")
