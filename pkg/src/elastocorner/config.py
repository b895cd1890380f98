import logging
import os
from enum import Enum, Flag, auto

import elastocorner
from elastocorner import ElastoCornerException, parser


logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "ELAS_THREADS"


class Convention(Enum):
    '''Form of the leading second-order block of the Navier operator.'''
    PAPER = "paper"
    '''λΔu + (λ+μ)∇(∇·u). Default value of `Settings.convention`.'''

    STANDARD = "standard"
    '''μΔu + (λ+μ)∇(∇·u), the classical Lamé operator.'''


class ElasFlag(Flag):
    '''Flags used for controlling various behaviours throughout the package. These can be set globally for the
    package using the `elastocorner.flags` attribute, or per-function for functions that include a `flags` keyword
    argument.
    '''
    NONE = 0
    '''No `ElasFlag` flags are set.'''

    STRICT = auto()
    '''When set, scene and prism files with unknown keys are rejected. Set by default.'''

    FD_FALLBACK = auto()
    '''When set, `navier_apply` and `boundary_traction` silently wrap fields that only provide values in a
    `elastocorner.fields.FiniteDifferenceField` instead of raising a `CapabilityError`.'''

    ALL = STRICT | FD_FALLBACK
    '''All `ElasFlag` flags are set.'''

elastocorner.flags = ElasFlag.STRICT # Default setting for global flags attribute.


class Settings:
    '''A singleton of this class holds the package-wide settings.

    The singleton is returned by calling `elastocorner.settings()`.
    '''
    def __init__(self):
        self._convention        = Convention.PAPER
        self._threads           = _threads_from_env()
        self._fd_step           = 1e-3
        self._angular_order     = 16
        self._radial_levels     = 40
        self._radial_ratio      = 0.5
        self._triangle_order    = 10
        self._disk_order        = 10
        self._s_grid            = (8.0, 12.0, 16.0, 24.0, 32.0)
        self._accuracy          = None
        self._variable_names    = ("x", "y", "z")

    @property
    def convention(self) -> Convention:
        '''Default `Convention` of the Navier operator.'''
        return self._convention

    @convention.setter
    def convention(self, value):
        self._convention = to_convention(value)

    @property
    def threads(self) -> int:
        '''Maximum number of worker threads used by parameter sweeps. Defaults to `$ELAS_THREADS`, else 1.'''
        return self._threads

    @threads.setter
    def threads(self, value: int):
        if int(value) < 1:
            raise SettingsError(f"threads must be at least 1, not {value}")
        self._threads = int(value)

    @property
    def fd_step(self) -> float:
        '''Default finite-difference step, relative to the local length scale.'''
        return self._fd_step

    @fd_step.setter
    def fd_step(self, value: float):
        if not value > 0:
            raise SettingsError(f"fd_step must be positive, not {value}")
        self._fd_step = float(value)

    @property
    def angular_order(self) -> int:
        '''Gauss nodes per angular panel of the graded sector rule.'''
        return self._angular_order

    @angular_order.setter
    def angular_order(self, value: int):
        self._angular_order = _check_order("angular_order", value, 2)

    @property
    def radial_levels(self) -> int:
        '''Number of geometric grading levels toward the corner in the graded sector rule.'''
        return self._radial_levels

    @radial_levels.setter
    def radial_levels(self, value: int):
        self._radial_levels = _check_order("radial_levels", value, 1)

    @property
    def radial_ratio(self) -> float:
        '''Ratio between consecutive radial panel edges of the graded sector rule.'''
        return self._radial_ratio

    @radial_ratio.setter
    def radial_ratio(self, value: float):
        if not 0 < value < 1:
            raise SettingsError(f"radial_ratio must lie in (0, 1), not {value}")
        self._radial_ratio = float(value)

    @property
    def triangle_order(self) -> int:
        '''Gauss order per direction of the collapsed triangle rule used by `polygon_rule`.'''
        return self._triangle_order

    @triangle_order.setter
    def triangle_order(self, value: int):
        self._triangle_order = _check_order("triangle_order", value, 1)

    @property
    def disk_order(self) -> int:
        '''Radial Gauss order per panel of `singular_disk_rule`.'''
        return self._disk_order

    @disk_order.setter
    def disk_order(self, value: int):
        self._disk_order = _check_order("disk_order", value, 1)

    @property
    def s_grid(self) -> tuple:
        '''Default increasing grid of probe parameters s.'''
        return self._s_grid

    @s_grid.setter
    def s_grid(self, values):
        values = tuple(float(s) for s in values)
        if len(values) < 2 or any(s <= 0 for s in values) or \
           any(b <= a for a, b in zip(values, values[1:])):
            raise SettingsError(f"s_grid must be a strictly increasing list of positive values: {values}")
        self._s_grid = values

    @property
    def accuracy(self):
        '''`elastocorner.special.SpecialFnAccuracy` used by the special functions.'''
        if self._accuracy is None:
            from elastocorner.special import SpecialFnAccuracy
            self._accuracy = SpecialFnAccuracy()
        return self._accuracy

    @accuracy.setter
    def accuracy(self, value):
        self._accuracy = value

    @property
    def variable_names(self) -> tuple:
        '''Names of the coordinate variables recognised in polynomial expressions, in order x₁, x₂, x₃.'''
        return self._variable_names

    @variable_names.setter
    def variable_names(self, names):
        names = tuple(names)
        if len(names) != 3 or len(set(names)) != 3 or not all(name.isidentifier() for name in names):
            raise SettingsError(f"variable_names must be three distinct identifiers: {names}")
        if any(name == "j" for name in names):
            raise SettingsError("'j' is reserved for imaginary literals")
        self._variable_names = names
        parser._recreate_parser()


def to_convention(value) -> Convention:
    '''Converts `value` (a `Convention`, its string value, or `None` for the settings default) to a `Convention`.'''
    if value is None:
        return elastocorner.settings().convention
    if isinstance(value, Convention):
        return value
    try:
        return Convention(str(value).lower())
    except ValueError:
        raise SettingsError(f"Unknown operator convention '{value}'") from None


def _check_order(name, value, minimum):
    if int(value) != value or value < minimum:
        raise SettingsError(f"{name} must be an integer of at least {minimum}, not {value}")
    return int(value)


def _threads_from_env() -> int:
    text = os.environ.get(THREADS_ENV_VAR)
    if not text:
        return 1
    try:
        threads = int(text)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", THREADS_ENV_VAR, text)
        return 1
    return max(1, threads)


class SettingsError(ElastoCornerException, ValueError):
    '''Raised when a setting is given an invalid value.'''


elastocorner._settings = Settings()
