"""
How much does filtering disturb the state?
==========================================
"""

# The entanglement fidelity F_e of the filtering channel is a single
# integral of the filter transform against |Phi|^2. It bounds both the
# Uhlmann fidelity (F_e <= F) and the trace distance
# (D <= sqrt(1 - F_e)), and for pure inputs F_e = F exactly.

import numpy as np

from psfilters import bounds, filters, states

# closed form sanity point: vacuum under a width-r Gaussian filter
for r in (0.5, 1.0, 2.0):
    cert = bounds.entanglement_fidelity(states.Vacuum(), filters.GaussianFilter(r))
    print(f"r = {r:3.1f}: F_e = {cert.f_e:.12f}   2/(2+r) = {2 / (2 + r):.12f}")

# the full chain on a mixed and a pure state
print(f"\n{'state':14s} {'filter':18s} {'F_e':>10s} {'F':>10s} "
      f"{'D':>10s} {'sqrt(1-F_e)':>12s}")
for st in (states.Thermal(0.5), states.Fock(1)):
    for filt in (filters.GaussianFilter(1.0),
                 filters.NonclassicalityFilter(2.0, 4.0)):
        rep = bounds.bound_chain_report(st, filt, dim=40)
        print(f"{st.charfn().label:14s} {filt.label:18s} "
              f"{rep.certificate.f_e:10.6f} {rep.fidelity_value:10.6f} "
              f"{rep.trace_distance_value:10.6f} "
              f"{rep.certificate.trace_distance_bound:12.6f}")

# pure states: F_e equals the Fock-space overlap
rep = bounds.pure_state_fidelity_exact(states.Fock(1), filters.GaussianFilter(1.0))
print(f"\npure check: |F_e - <psi|rho|psi>| = {rep.agreement:.2e}")

# widening the filter pushes F_e to one; solve for the width that keeps
# the trace-distance bound at 0.1
sol = bounds.solve_width(states.Fock(1), filters.nonclassicality_family(4.0),
                         epsilon=0.01)
print(f"\nsmallest q=4 width with F_e >= 0.99: L* = {sol.width:.4f} "
      f"({sol.n_evaluations} evaluations)")
print(f"  F_e(L*)   = {sol.certificate.f_e:.6f}")
half = bounds.entanglement_fidelity(
    states.Fock(1), filters.NonclassicalityFilter(sol.width / 2, 4.0))
print(f"  F_e(L*/2) = {half.f_e:.6f}  (below target, so L* is minimal)")
print(f"  error bound sqrt(1 - F_e) = {np.sqrt(1 - sol.certificate.f_e):.4f}")
