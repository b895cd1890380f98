'''
## Overview

**elastocorner is a Python package for probing corners of time-harmonic elastic sources.** It implements the
exponential probe solutions of the two-dimensional Navier operator, the corner integration-by-parts identity, exact
sector moments and their bounds, the elastic Green's tensor and far-field operators, the dimension reduction that turns
three-dimensional edges into planar corners, and an explicit nonradiating ball source. Every formula is paired with an
independent numerical check.

Its dependencies are [NumPy](https://numpy.org), [joblib](https://joblib.readthedocs.io) for parallel sweeps and
the [Lark](https://github.com/lark-parser/lark) parsing toolkit for polynomial density expressions.

`elastocorner` defines the following primary classes:
  - `elastocorner.elastic.LameParameters`:  A Lamé pair (λ, μ) satisfying the strong convexity condition.
  - `elastocorner.elastic.SourceScene`:     A source f = χ_Ω φ with a polynomial density, a material and a frequency.
  - `elastocorner.geometry.Sector`:         A planar cone (θ_m, θ_M).
  - `elastocorner.geometry.CornerChart`:    A polygon vertex translated to the origin and rotated so that its cone is
    symmetric about the positive x₁-axis.
  - `elastocorner.probe.ExponentialProbe`:  The probe v = (exp(−s√z), i·exp(−s√z)).

For convenience these classes can be directly imported from `elastocorner`.

## Examples

```python
>>> import numpy as np
>>> from elastocorner import *
>>> K = Sector(0, np.pi/2)
>>> abs(sector_moment_exact(K, 2) + 0.75j) < 1e-14            # 6i(e^{-2iθ_M} - e^{-2iθ_m}) s^-4
True
>>> square = ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])
>>> chart = corner_chart(square, 0)
>>> density = PolynomialField.parse(["1", "0"])
>>> abs(moment_extract(density, chart) - 1) < 0.02   # f1(0) + i f2(0)
True
>>> tuned = tune_lame(1.0, 1, 2)               # nonradiating ball material
>>> verify_nonradiating(1.0, 1, 2)["max_farfield"] < 1e-8
True
```

## Operator convention

The Navier operator can be evaluated in two forms, selected by `elastocorner.config.Convention`:

  - `Convention.PAPER`:    λΔu + (λ+μ)∇(∇·u)
  - `Convention.STANDARD`: μΔu + (λ+μ)∇(∇·u)

The two coincide when λ = μ. The Green's tensor, far fields and the corner identity always use the standard form,
since the boundary traction is the conormal derivative of that operator. The default convention used elsewhere can be
changed through the `elastocorner.config.Settings` singleton returned by `settings()`.

## Command line

The `elastocorner` console script exposes the subcommands `verify`, `farfield`, `witness`, `nonradiating`,
`reduce` and `moment`. Run `elastocorner --help` for details. The environment variable `ELAS_THREADS` caps the
number of worker threads used by parameter sweeps.

## Installation

   `pip install elastocorner`

## Build Instructions

Use these instructions if you're building from the source. elastocorner has been developed on Python 3.10.

1. `python3 -m venv venv` (Create a virtual environment.)
1. `source venv/bin/activate` (Activate the virtual environment.)
1. For development work...
   - `pip install -e .[test]` (Creates an editable local install, with scipy for the test oracles)
   - `python -m unittest discover test`
1. ...or to build the package:
   - `pip install build`
   - `python -m build`

## Top-Level Objects
'''

def settings():
    '''Returns the package `elastocorner.config.Settings` singleton, holding the operator convention, default
    quadrature orders and other package-wide settings. They can be changed by setting properties on this singleton.
    '''
    return _settings

_settings = None  # Will be set by config submodule.

flags = None # Will be set by config submodule.
'''Global package attribute that is a `elastocorner.config.ElasFlag` enum whose elements control package-wide
behaviour. Many functions take a `flags` keyword-argument that overrides this global `flags` attribute during the
execution of that function.
'''

class ElastoCornerException(Exception):
    '''Parent class for all Exception types in this package.'''


from . import config
from .config import Convention, ElasFlag, Settings
from .special import (SpecialFnAccuracy, bessel_j_half, hankel1_zero, hankel1_one, j32_zero, gamma,
                      DomainError, UnsupportedOrderError)
from .poly import Polynomial, PolynomialField
from .geometry import (Sector, ConvexPolygon, CornerChart, BallSupport, QuadratureRule, corner_chart,
                       sector_ball_rule, singular_disk_rule, arc_rule, polygon_rule, polar_fan_rule, ball_rule,
                       fibonacci_sphere, circle_directions, GeometryError)
from .fields import FiniteDifferenceField, SampledField, CapabilityError
from .probe import (ExponentialProbe, principal_sqrt, probe_eval, probe_traction_on_circle, sector_constant,
                    sector_moment_exact, sector_moment_quadrature, sector_alpha_bound, sector_tail_bound,
                    sector_monomial_moment, sector_abs_moment, tail_bound_regime)
from .elastic import (LameParameters, Wavenumbers, SourceScene, FarFieldPattern, CauchyData, navier_apply,
                      boundary_traction, helmholtz_fundamental, green_tensor, volume_potential, far_field,
                      far_field_pattern, helmholtz_split, far_field_asymptotic_check, StrongConvexityError)
from .corner import (ManufacturedCornerField, MomentSweep, WitnessSweep, DimensionReductionSpec, build_manufactured,
                     corner_identity_check, moment_sweep, moment_extract, corner_value_extract, witness,
                     boundary_functional_decay, dimension_reduce, reduced_equation_check, edge_vanishing_demo)
from .nonradiating import BallScene, ball_char_ft, tune_lame, verify_nonradiating
from .scene import SceneFile, PrismFile, parse_scene, load_scene, parse_prism, load_prism, SceneParsingError
from .verify import CheckResult, check_names, run_check, run_checks, UnknownSuiteError
