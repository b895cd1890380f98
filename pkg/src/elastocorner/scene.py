'''Reading scene and prism files.

A scene file is a JSON document such as

    {
        "name": "square",
        "dim": 2,
        "convention": "standard",
        "lambda": 1.0, "mu": 1.0, "omega": 2.0,
        "support": {"polygon": [[0, 0], [1, 0], [1, 1], [0, 1]]},
        "density": [{"terms": [{"px": 0, "py": 0, "re": 1.0, "im": 0.0}]}, "0.5*x*y"],
        "holder_alpha": 1.0
    }

Each density component is either a term list or a polynomial expression string (see `elastocorner.parser`). 3D
scenes use `{"ball": {"radius": r}}` as support and may add `pz` to their terms. A prism file describes a manufactured
field on a cone times the line, for `elastocorner.corner.reduced_equation_check`.

Errors are raised as `SceneParsingError`, naming the offending field and its position in the file. When
`ElasFlag.STRICT` is set, unknown keys are errors too.
'''
import json
import logging
import re
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import elastocorner
from elastocorner import ElastoCornerException
from elastocorner.config import Convention, ElasFlag, to_convention
from elastocorner.elastic import LameParameters, SourceScene
from elastocorner.geometry import BallSupport, ConvexPolygon, CornerChart, Sector
from elastocorner.poly import Polynomial, PolynomialField


logger = logging.getLogger(__name__)

SCENE_KEYS = {"name", "dim", "convention", "lambda", "mu", "omega", "support", "density", "holder_alpha"}
PRISM_KEYS = {"name", "sector", "h", "core", "lambda", "mu", "omega", "convention", "L", "width", "xis",
              "edge_density"}
TERM_KEYS = {"px", "py", "pz", "re", "im"}


@dataclass(frozen=True)
class SceneFile:
    '''A parsed scene file: the scene and the operator convention it asks for, if any.'''
    scene: SourceScene
    convention: Optional[Convention] = None


@dataclass(frozen=True)
class PrismFile:
    '''A parsed prism file.

    The manufactured field is `core` times the edge envelope of `chart`; `edge_density` is the 3D source whose
    reduced corner values `elastocorner.corner.edge_vanishing_demo` reconstructs.
    '''
    chart: CornerChart
    core: PolynomialField
    material: LameParameters
    omega: float
    xis: tuple
    L: float = 1.0
    width: Optional[float] = None
    convention: Optional[Convention] = None
    edge_density: Optional[PolynomialField] = None
    name: Optional[str] = None


class _Document:
    '''The raw text of a file with its decoded JSON, used to point errors at a line and column.'''

    def __init__(self, text: str, source: str = None):
        self.text = text
        self.source = source
        try:
            self.data = json.loads(text)
        except json.JSONDecodeError as e:
            raise SceneParsingError(f"Invalid JSON: {e.msg}", e.lineno, e.colno) from e
        if not isinstance(self.data, dict):
            raise SceneParsingError("The top level must be a JSON object", 1, 1)

    def locate(self, field: str):
        '''(line, column) of the first occurrence of the key `field`, or (None, None).'''
        key = field.split(".")[-1].split("[")[0]
        match = re.search(f'"{re.escape(key)}"\\s*:', self.text)
        if match is None:
            return None, None
        before = self.text[:match.start()]
        return before.count("\n") + 1, match.start() - before.rfind("\n")

    def error(self, mesg: str, field: str) -> 'SceneParsingError':
        line, column = self.locate(field)
        where = f" ({self.source})" if self.source else ""
        return SceneParsingError(f"{field}: {mesg}{where}", line, column, field)

    @contextmanager
    def field(self, name: str):
        '''Re-raises any validation error inside the block as a `SceneParsingError` for field `name`.'''
        try:
            yield
        except SceneParsingError:
            raise
        except (ElastoCornerException, ValueError, TypeError, KeyError) as e:
            raise self.error(str(e), name) from e

    def require(self, key: str):
        if key not in self.data:
            raise self.error("missing required key", key)
        return self.data[key]

    def check_keys(self, mapping: dict, allowed: set, where: str, flags: ElasFlag):
        unknown = sorted(set(mapping) - allowed)
        if not unknown:
            return
        if ElasFlag.STRICT in flags:
            raise self.error(f"unknown key '{unknown[0]}'", f"{where}{unknown[0]}")
        logger.warning("Ignoring unknown keys %s", ", ".join(unknown))


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"{name} must be a number, not {value!r}")
    return float(value)


def _term_polynomial(doc: _Document, spec: dict, nvars: int, where: str, flags: ElasFlag) -> Polynomial:
    terms = spec.get("terms")
    if not isinstance(terms, list):
        raise doc.error("a term list needs a 'terms' array", where)
    doc.check_keys(spec, {"terms"}, f"{where}.", flags)
    result = Polynomial.constant(0.0, nvars)
    axes = ("px", "py", "pz")[:nvars]
    for i, term in enumerate(terms):
        name = f"{where}.terms[{i}]"
        if not isinstance(term, dict):
            raise doc.error("each term must be an object", name)
        doc.check_keys(term, set(axes) | {"re", "im"}, f"{name}.", flags)
        with doc.field(name):
            powers = []
            for axis in axes:
                p = term.get(axis, 0)
                if isinstance(p, bool) or not isinstance(p, int) or p < 0:
                    raise ValueError(f"{axis} must be a non-negative integer, not {p!r}")
                powers.append(p)
            coeff = complex(_number(term.get("re", 0.0), "re"), _number(term.get("im", 0.0), "im"))
            result = result + Polynomial({tuple(powers): coeff}, nvars)
    return result


def _density(doc: _Document, dim: int, flags: ElasFlag, key: str = "density") -> PolynomialField:
    raw = doc.require(key)
    if not isinstance(raw, list) or len(raw) != dim:
        raise doc.error(f"needs a list of {dim} components", key)
    components = []
    for i, component in enumerate(raw):
        where = f"{key}[{i}]"
        if isinstance(component, dict):
            components.append(_term_polynomial(doc, component, dim, where, flags))
            continue
        with doc.field(where):
            if isinstance(component, str):
                components.append(Polynomial.parse(component, dim))
            else:
                components.append(Polynomial.constant(_number(component, "component"), dim))
    return PolynomialField(components)


def _support(doc: _Document, dim: int, flags: ElasFlag):
    raw = doc.require("support")
    if not isinstance(raw, dict) or len(raw) != 1:
        raise doc.error("needs exactly one of 'polygon' or 'ball'", "support")
    kind, value = next(iter(raw.items()))
    if kind == "polygon":
        if dim != 2:
            raise doc.error("polygon supports need dim = 2", "support.polygon")
        with doc.field("support.polygon"):
            return ConvexPolygon(value)
    if kind == "ball":
        if dim != 3:
            raise doc.error("ball supports need dim = 3", "support.ball")
        if not isinstance(value, dict):
            raise doc.error("needs an object with 'radius'", "support.ball")
        doc.check_keys(value, {"radius", "center"}, "support.ball.", flags)
        with doc.field("support.ball"):
            return BallSupport(_number(value.get("radius", 1.0), "radius"),
                               tuple(_number(c, "center") for c in value.get("center", (0.0, 0.0, 0.0))))
    raise doc.error(f"unknown support type '{kind}'", "support")


def _material(doc: _Document, dim: int) -> LameParameters:
    with doc.field("lambda"):
        lam = _number(doc.require("lambda"), "lambda")
    with doc.field("mu"):
        mu = _number(doc.require("mu"), "mu")
    with doc.field("mu" if mu <= 0 else "lambda"):
        return LameParameters(lam, mu, dim)


def _convention(doc: _Document) -> Optional[Convention]:
    if "convention" not in doc.data:
        return None
    with doc.field("convention"):
        return to_convention(doc.data["convention"])


def parse_scene(text: str, flags: ElasFlag = None, source: str = None) -> SceneFile:
    '''Parses the JSON text of a scene file into a `SceneFile`.'''
    flags = flags or elastocorner.flags or ElasFlag.NONE
    doc = _Document(text, source)
    doc.check_keys(doc.data, SCENE_KEYS, "", flags)
    dim = doc.require("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim not in (2, 3):
        raise doc.error(f"must be 2 or 3, not {dim!r}", "dim")
    convention = _convention(doc)
    material = _material(doc, dim)
    with doc.field("omega"):
        omega = _number(doc.require("omega"), "omega")
        if not omega > 0:
            raise ValueError(f"frequency must be positive, not {omega}")
    support = _support(doc, dim, flags)
    density = _density(doc, dim, flags)
    with doc.field("holder_alpha"):
        alpha = _number(doc.data.get("holder_alpha", 1.0), "holder_alpha")
        if not 0 < alpha <= 1:
            raise ValueError(f"must lie in (0, 1], not {alpha}")
    name = doc.data.get("name", Path(source).stem if source else None)
    with doc.field("density"):
        scene = SourceScene(support, density, material, omega, alpha, name)
    logger.debug("Parsed %dD scene '%s'", dim, name)
    return SceneFile(scene, convention)


def load_scene(path, flags: ElasFlag = None) -> SceneFile:
    '''Reads and parses a scene file.'''
    path = Path(path)
    return parse_scene(path.read_text(encoding="utf-8"), flags, str(path))


def parse_prism(text: str, flags: ElasFlag = None, source: str = None) -> PrismFile:
    '''Parses the JSON text of a prism file into a `PrismFile`.'''
    flags = flags or elastocorner.flags or ElasFlag.NONE
    doc = _Document(text, source)
    doc.check_keys(doc.data, PRISM_KEYS, "", flags)
    with doc.field("sector"):
        lo, hi = (_number(v, "sector") for v in doc.require("sector"))
        sector = Sector(lo, hi)
    with doc.field("h"):
        chart = CornerChart.from_sector(sector, _number(doc.data.get("h", 1.0), "h"))
    core = _density(doc, 3, flags, "core")
    material = _material(doc, 3)
    with doc.field("omega"):
        omega = _number(doc.data.get("omega", 0.0), "omega")
        if omega < 0:
            raise ValueError(f"frequency must be non-negative, not {omega}")
    with doc.field("L"):
        L = _number(doc.data.get("L", 1.0), "L")
        if not L > 0:
            raise ValueError(f"half-length must be positive, not {L}")
    with doc.field("width"):
        width = doc.data.get("width")
        width = None if width is None else _number(width, "width")
    with doc.field("xis"):
        xis = tuple(_number(v, "xis") for v in doc.data.get("xis", (0.0, 1.0, 2.0, 4.0)))
    edge_density = _density(doc, 3, flags, "edge_density") if "edge_density" in doc.data else None
    return PrismFile(chart, core, material, omega, xis, L, width, _convention(doc), edge_density,
                     doc.data.get("name"))


def load_prism(path, flags: ElasFlag = None) -> PrismFile:
    '''Reads and parses a prism file.'''
    path = Path(path)
    return parse_prism(path.read_text(encoding="utf-8"), flags, str(path))


class SceneParsingError(ElastoCornerException):
    '''Raised when a scene or prism file cannot be parsed or describes an invalid scene.

    Contains three extra attributes:

     - `line`:   1-based line of the offending key or JSON syntax error, when known.
     - `column`: 1-based column of the same position.
     - `field`:  dotted name of the offending field, when the error is not a JSON syntax error.
    '''
    def __init__(self, mesg, line=None, column=None, field=None, *args, **kwargs):
        super().__init__(mesg, *args, **kwargs)
        self.line = line
        self.column = column
        self.field = field
