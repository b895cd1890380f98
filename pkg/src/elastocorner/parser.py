'''Submodule for parsing polynomial density expressions such as `"1 + 2*x*y - 0.5j*y^2"`. The contents of this
submodule should be considered an implementation detail and not relied upon; use `Polynomial.parse()` or
`PolynomialField.parse()` instead.

The variable names are taken from `elastocorner.settings().variable_names`; changing them recreates the parser.
'''
from lark import Lark, UnexpectedInput
from lark import Transformer, v_args
from lark.visitors import VisitError

from elastocorner import ElastoCornerException, settings
from elastocorner.poly import Polynomial, PolynomialError


_parser_obj = None

def _parser():
    '''Return a Lark parser singleton.'''
    global _parser_obj
    if _parser_obj is None:
        _recreate_parser()
    return _parser_obj


_transformer_obj = None

def _transformer():
    '''Return a Lark Transformer singleton.'''
    global _transformer_obj

    if _transformer_obj is None:
        _transformer_obj = _PolynomialTransformer()
    return _transformer_obj


def _parse(string: str, nvars: int = 2) -> Polynomial:
    '''Parse `string` as a `elastocorner.poly.Polynomial` in `nvars` variables.'''
    try:
        tree = _parser().parse(string)
    except UnexpectedInput as orig:
        start_pos = getattr(orig, "pos_in_stream", None)
        if start_pos is None or start_pos < 0:
            start_pos = len(string)
        end_pos = start_pos + 1
        unexpected = string[start_pos:end_pos] or "end of input"
        new_error = ExpressionParsingError(f"Unexpected text: {unexpected}", start_pos, end_pos)
        new_error.orig = orig
        raise new_error

    try:
        _transformer().nvars = nvars
        polynomial = _transformer().transform(tree)
    except VisitError as e:
        raise e.orig_exc
    return polynomial


def _meta_info_to_pos(meta_info):
    return (meta_info.start_pos, meta_info.end_pos)


@v_args(meta=True)
class _PolynomialTransformer(Transformer):
    '''Lark Transformer for turning expression trees into polynomials.'''
    def __init__(self, *args, nvars: int = 2, **kwargs):
        super().__init__(*args, **kwargs)
        self.nvars = nvars

    def add(self, meta, children): # Children: sum product
        return children[0] + children[1]

    def sub(self, meta, children): # Children: sum product
        return children[0] - children[1]

    def mul(self, meta, children): # Children: product factor
        return children[0] * children[1]

    def neg(self, meta, children): # Children: factor
        return -children[0]

    def pos(self, meta, children): # Children: factor
        return children[0]

    def pow(self, meta, children): # Children: atom INT
        base, exponent = children
        try:
            return base ** int(exponent)
        except PolynomialError as e:
            raise ExpressionParsingError(str(e), *_meta_info_to_pos(meta))

    def number(self, meta, children): # Children: NUMBER
        return Polynomial.constant(float(children[0]), self.nvars)

    def imag(self, meta, children): # Children: IMAG
        return Polynomial.constant(complex(0, float(str(children[0])[:-1])), self.nvars)

    def var(self, meta, children): # Children: VAR
        token = children[0]
        index = settings().variable_names.index(str(token))
        if index >= self.nvars:
            raise ExpressionParsingError(f"Variable '{token}' is not available in {self.nvars} dimensions",
                                         token.start_pos, token.end_pos)
        return Polynomial.variable(index, self.nvars)


def _recreate_parser():
    global _parser_obj
    names = settings().variable_names
    var_alternatives = " | ".join(f'"{name}"' for name in names)
    grammar = rf'''
        ?start: sum

        ?sum: product
            | sum "+" product   -> add
            | sum "-" product   -> sub

        ?product: factor
            | product "*" factor -> mul

        ?factor: power
            | "-" factor        -> neg
            | "+" factor        -> pos

        ?power: atom
            | atom ("^" | "**") INT -> pow

        ?atom: NUMBER           -> number
            | IMAG              -> imag
            | VAR               -> var
            | "(" sum ")"

        IMAG.2: /((\d+(\.\d*)?)|(\.\d+))([eE][+-]?\d+)?j/
        VAR: {var_alternatives}

        %import common.NUMBER
        %import common.INT
        %import common.WS
        %ignore WS
    '''
    _parser_obj = Lark(grammar, propagate_positions=True)


class ExpressionParsingError(ElastoCornerException):
    '''Raised when there is an error parsing a polynomial expression.

    Contains two extra attributes:

     - `start_pos`: index of the first unexpected character in the string for parsing.
     - `end_pos`:   index + 1 of the last unexpected character in the string for parsing.
    '''
    def __init__(self, mesg, start_pos=None, end_pos=None, *args, **kwargs):
        super().__init__(mesg, *args, **kwargs)
        self.start_pos = start_pos
        self.end_pos = end_pos
