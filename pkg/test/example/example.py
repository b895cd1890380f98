import numpy as np

from elastocorner import *
# Probe solutions and exact sector moments...
K = Sector(-np.pi/4, np.pi/4)
probe = ExponentialProbe(8.0)
probe.values([[0.1, 0.02]])     # v = (e^{-s√z}, i e^{-s√z})
sector_constant(K)              # C_K = 6i(e^{-2iθ_M} - e^{-2iθ_m})
sector_moment_exact(K, 8.0)     # C_K s^-4
sector_moment_quadrature(K, 8.0)

# Corners of a polygon scene
square = ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])
chart = corner_chart(square, 0)
chart.sector.opening
scene = SourceScene(square, PolynomialField.parse(["1 + x*y", "0.5 - y"]), LameParameters(1.0, 1.0), 2.0)
moment_extract(scene.density, chart)    # ≈ f1(0) + i f2(0) = 1 + 0.5i
sweep = witness(scene, 0)
sweep.limit                     # does not vanish: the square radiates
far_field_pattern(scene, 16).max_magnitude

# The nonradiating ball
material = tune_lame(1.0, 1, 2)
material.lam, material.mu       # ≈ 0.0160153, 0.0167562
verify_nonradiating(1.0, 1, 2)["max_farfield"]
verify_nonradiating(1.0, material=LameParameters(1.0, 1.0, 3))["max_farfield"]

# Scene files and the check suites
load_scene("square_scene.json").scene.name
run_checks("special")["passed"]
