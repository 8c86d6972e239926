"""Walk through one steering-vector estimate and its optimality certificates."""
import numpy as np

from sdrbeam import Scenario, SectorModel, estimate_steering, sample_covariance
from sdrbeam.sim import draw_actual_steering, generate_snapshots, make_rng
from sdrbeam.svest import dual_objective

# Default scene: 10-element half-wavelength ULA, presumed DOA 3 deg,
# interferers at 30 and 50 deg (INR 30 dB), SNR 20 dB, K = 30 snapshots
sc = Scenario()
a_true = draw_actual_steering(sc, make_rng(sc.seed, 0, 0))
R = sample_covariance(generate_snapshots(sc, a_true, make_rng(sc.seed, 0, 1)))

# The sector [-2, 8] deg gives the out-of-sector matrix C~ and the threshold Delta0
model = SectorModel.build(sc.geometry, sc.sector)
print("Delta0 =", round(model.delta0, 4), " M*lambda_min(C~) =",
      round(10 * np.linalg.eigvalsh(model.c_tilde)[0], 4), "->", model.feasibility().name)

# The reduced dual g(gamma2) is concave; a coarse look before solving
for g2 in [0.0, 1e-4, 3e-4, 1e-3, 3e-3]:
    val, g1, sub, _ = dual_objective(g2, R.inverse, model.c_tilde, model.delta0, 10)
    print(f"gamma2={g2:.0e}  g={val:.6e}  supergradient={sub:+.3f}")

est = estimate_steering(R.inverse, model.c_tilde, model.delta0, 10)
print("\nrecovery case:", est.case, " null dim:", est.dual.null_dim)
print("gamma1 = %.6e, gamma2 = %.6e" % (est.dual.gamma1, est.dual.gamma2))
print("primal %.10e  dual %.10e  gap %.1e" % (est.objective, est.dual.dual_value, est.duality_gap))
print(est.kkt_residuals)

# How close is the estimate to the actual steering vector?
print("|a_hat^H a| / M =", round(abs(np.vdot(est.a_hat, a_true)) / 10, 4))
print("|p^H a| / M     =", round(abs(np.vdot(sc.presumed_steering, a_true)) / 10, 4))
