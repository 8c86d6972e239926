"""Why the estimator-based beamformer saturates well below the optimum.

Delta0 is the largest value of d^H C~ d over the whole sector, taken at a
sector edge. At the actual DOA the value is much smaller, so the estimate
can move toward an interferer and still satisfy the constraint. Using the
true covariance (no finite-sample effects) makes this visible.
"""
import numpy as np

from sdrbeam import Scenario, SectorModel
from sdrbeam.array_model import steering
from sdrbeam.evaluation import optimal_sinr, output_sinr
from sdrbeam.sector import constraint_term
from sdrbeam.sim import true_interference_plus_noise_covariance
from sdrbeam.svest import estimate_steering

sc = Scenario()
a = sc.presumed_steering
r_in = true_interference_plus_noise_covariance(sc)
R = r_in + sc.signal_power * np.outer(a, a.conj())
Ri = np.linalg.inv(R)
opt = optimal_sinr(a, sc.signal_power, r_in)
model = SectorModel.build(sc.geometry, sc.sector)

print("d^H C~ d at the true DOA:", round(constraint_term(sc.geometry, model.c_tilde, 3.0)[0], 3))
print("Delta0 (sector maximum): ", round(model.delta0, 3))

for label, d0 in [("sector maximum", model.delta0),
                  ("value at true DOA", constraint_term(sc.geometry, model.c_tilde, 3.0)[0] * (1 + 1e-9))]:
    est = estimate_steering(Ri, model.c_tilde, d0, 10)
    w = Ri @ est.a_hat
    leak = abs(np.vdot(steering(sc.geometry, 30.0), est.a_hat)) / 10
    print(f"\nDelta0 = {label}: SINR {output_sinr(w, a, sc.signal_power, r_in):.2f} dB "
          f"(optimum {opt:.2f}), |d(30)^H a_hat|/M = {leak:.3f}")
