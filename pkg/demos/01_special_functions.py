"""
Marcum Q1 and the Rician power gain
===================================

The legitimate-link SNR of a Rician hop has a Marcum-Q survival function.
This script checks the sampler against it and shows why the complement
1 - Q1 is summed on its own when it is tiny.
"""
import math

import numpy as np

from ntnscp.specfun import marcum_p1, marcum_q1, rician_power_isf, sample_rician_power

rng = np.random.default_rng(0)

# Q1(0, b) is the Rayleigh tail exp(-b^2/2)
b = np.array([0.5, 1.0, 2.0, 4.0])
print("Q1(0, b)      ", marcum_q1(0.0, b))
print("exp(-b^2 / 2) ", np.exp(-b * b / 2))

# Empirical tail of the unit-mean Rician power vs Q1(sqrt(2K), sqrt(2(K+1)x))
for k in (0.0, 1.0, 9.0, 22.0):
    g = sample_rician_power(k, rng, 10**6)
    x = rician_power_isf(0.5, k)  # the median
    exact = marcum_q1(math.sqrt(2 * k), math.sqrt(2 * (k + 1) * x))
    print(f"K={k:5.1f}  median={x:.4f}  P(g > median): empirical {np.mean(g > x):.4f}  Q1 {exact:.4f}")

# Deep in the lower tail the complement matters: 1 - Q1 has no digits left
a, b = 10.0, 0.3
print(f"1 - Q1({a}, {b}) = {1 - marcum_q1(a, b):.3e}   marcum_p1 = {marcum_p1(a, b):.3e}")
