"""Direction-dependent wave speeds in an anisotropic medium.

In a medium with a full permittivity tensor the propagation speed along
a unit normal n is c = sqrt(n^T eps n / (mu det eps)); the flux uses the
impedance Z = mu c of each side of a face. This script sweeps the
direction and shows the speed anisotropy, plus the impedance mismatch
across a material jump.
"""

import numpy as np

from dgtd import PermittivityTensor, effective_permittivity, wave_speed

eps = PermittivityTensor(5.0, 1.0, 1.0, 3.0)
lo, hi = eps.eigenvalues()
print(f"tensor eigenvalues: {lo:.4f}, {hi:.4f}")
print(f"isotropic speeds would be  1/sqrt(eig): {1/np.sqrt(hi):.4f} .. {1/np.sqrt(lo):.4f}")

print("\n angle   eps_eff     c")
for deg in range(0, 181, 15):
    t = np.radians(deg)
    n = (np.cos(t), np.sin(t))
    print(f"  {deg:4d}  {effective_permittivity(eps, n):8.4f}  {wave_speed(eps, 1.0, n):.4f}")

# Impedance mismatch across a face between this medium and vacuum
n = (1.0, 0.0)
z_left = 1.0 * wave_speed(eps, 1.0, n)
z_right = 1.0 * wave_speed(PermittivityTensor.isotropic(1.0), 1.0, n)
print(f"\nimpedances across a vacuum interface (n = {n}):")
print(f"  Z- = {z_left:.4f} (anisotropic side), Z+ = {z_right:.4f} (vacuum)")
print(f"  reflection coefficient (Z+ - Z-)/(Z+ + Z-) = "
      f"{(z_right - z_left) / (z_right + z_left):+.4f}")
