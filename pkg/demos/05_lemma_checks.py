"""
Quadrature checks of the three lemmas
=====================================

Lemma 1 is an exact identity, Lemma 2 an approximation that improves with
the Marcum amplitude, and Lemma 3 an identity checked by sampling.
"""
import numpy as np

from ntnscp import verify

print("Lemma 1 relative residual:", verify.lemma1_residual(2.0, 2.5, 1e-3))

for b_hat, lam_c, alpha in [(1.0, 1.0, 2.5), (2.0, 2.0, 2.9)]:
    devs, mono = verify.lemma2_profile(b_hat, lam_c, alpha)
    print(f"Lemma 2 b={b_hat} lambdaC={lam_c} alpha={alpha}: |dev| =",
          " ".join(f"{d:.4f}" for d in devs), "(monotone)" if mono else "(not monotone)")
    print("   signed:", " ".join(f"{verify.lemma2_residual(a, b_hat, lam_c, alpha):+.4f}" for a in verify.LEMMA2_A))

res = verify.lemma3_check([0.5, 1.0, 2.0], 0.8, 10**6, np.random.default_rng(3))
print(f"Lemma 3 analytic {res.analytic:.5f} empirical {res.empirical:.5f} z={res.z:.2f}")
