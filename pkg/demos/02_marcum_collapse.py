"""
Collapsing a product of Marcum Q-functions
==========================================

The weakest-hop SNR of a layer has survival function prod_i Q1(a_i, b_i sqrt(x)).
The closed form replaces it with one Q1(a_hat, b_hat sqrt(x)), where
b_hat^2 = sum b_i^2 and a_hat is fitted on a log grid of x. Here we look at
one route in detail and then at the mean error over random routes.
"""
import numpy as np

from ntnscp.closedform import FIT_GRID, fit_marcum_a_hat, marcum_product
from ntnscp.model import reference_layer
from ntnscp.specfun import marcum_q1
from ntnscp.verify import marcum_product_error, random_layer_hops

rng = np.random.default_rng(1)
ground = reference_layer("Ground")
hops = random_layer_hops(ground, (4, 4), rng)
print("hops (km, K):", [(round(h.distance / 1e3, 1), round(h.k_factor, 2)) for h in hops])

fit = fit_marcum_a_hat(hops, ground)
exact = marcum_product(hops, ground)
approx = marcum_q1(fit.a_hat, np.sqrt(fit.b_hat_sq_coeff * FIT_GRID))
print(f"a_hat = {fit.a_hat:.4f}, max |exact - approx| = {np.max(np.abs(exact - approx)):.4f}")
for i in range(0, 200, 25):
    print(f"  x={FIT_GRID[i]:.2e}  exact={exact[i]:.4f}  collapsed={approx[i]:.4f}")

# Mean pointwise error over random routes of 2..7 hops (fewer trials than the
# acceptance study so the script stays quick)
for name in ("LEO", "Ground"):
    curve = marcum_product_error(reference_layer(name), trials=100, rng=np.random.default_rng(2))
    print(f"{name:6s} max mean |error| over the grid: {curve.max_error:.4f}")
