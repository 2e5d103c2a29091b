"""Parsing of sweep grid expressions and k-rules.

Grids of test-count fractions are written as

* a single number: ``1.3``;
* an inclusive range ``start:stop:step``: ``0.5:1.4:0.1``;
* a list: ``[0.5, 0.8, 1.1]``.

A k-rule gives the number of defectives as a function of the population
size ``p``: ``8``, ``ceil(p^0.7)``, ``ceil(log2(p))^2``,
``floor(sqrt(p) / 2)``. Rules must evaluate to positive integers.
"""
import math

from pyparsing import (Regex, Literal, Suppress, CaselessKeyword,
                       Forward, Group, DelimitedList, one_of,
                       infix_notation, OpAssoc, StringEnd,
                       ParseException)

from gtaon.exceptions import ParsingError


# Definition of literals
def eval_number(s, l, t):
    text = t[0]
    if "." in text or "e" in text.lower():
        return [float(text)]
    return [int(text)]


number = Regex(r"\d+(\.\d*)?([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?")
number.set_parse_action(eval_number)

colon = Suppress(Literal(":"))
list_open = Suppress(Literal("["))
list_close = Suppress(Literal("]"))

# define here grids


class GridTokens(object):
    """Parsed grid: a range triple or a list of values."""

    def __init__(self, kind, values):
        self.kind = kind
        self.values = tuple(values)


grid_range = Group(number + colon + number + colon + number)
grid_range.set_parse_action(lambda t: [GridTokens("range", t[0])])

grid_list = list_open + Group(DelimitedList(number, delim=",")) + list_close
grid_list.set_parse_action(lambda t: [GridTokens("list", t[0])])

grid_single = number.copy()
grid_single.set_parse_action(
    lambda s, l, t: [GridTokens("list", eval_number(s, l, t))])

grid = (grid_range | grid_list | grid_single) + StringEnd()

# define here k-rules

p_var = CaselessKeyword("p")
p_var.set_parse_action(lambda t: "p")

FUNCTIONS = {
    "ceil": math.ceil,
    "floor": math.floor,
    "round": lambda x: int(math.floor(x + 0.5)),
    "log2": math.log2,
    "log": math.log,
    "sqrt": math.sqrt,
}

function_name = one_of(list(FUNCTIONS.keys()))

k_expression = Forward()
call = Group(function_name + Suppress(Literal("(")) + k_expression +
             Suppress(Literal(")")))
operand = call | number | p_var

k_expression << infix_notation(operand, [
    (Literal("^"), 2, OpAssoc.RIGHT),
    (one_of("* /"), 2, OpAssoc.LEFT),
    (one_of("+ -"), 2, OpAssoc.LEFT),
])

k_rule = k_expression + StringEnd()


def _range_values(start, stop, step):
    if step <= 0:
        raise ParsingError(
            "Grid step must be positive, got {}".format(step))
    if stop < start:
        raise ParsingError(
            "Grid range {}:{}:{} is empty".format(start, stop, step))
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def parse_grid(text):
    """Parse a grid expression into a list of floats.

    Raises
    ------
    ParsingError
        If the expression is malformed or the range is empty.
    """
    try:
        parsed = grid.parse_string(str(text).strip())
    except ParseException as e:
        raise ParsingError(
            "Cannot parse grid '{}': {}".format(text, e))
    kind, values = parsed[0].kind, parsed[0].values
    if kind == "range":
        return _range_values(*[float(v) for v in values])
    return [float(v) for v in values]


def _fold(tokens, p):
    values = [_evaluate(t, p) for t in tokens[::2]]
    ops = tokens[1::2]
    if ops and ops[0] == "^":
        result = values[-1]
        for base in reversed(values[:-1]):
            result = base ** result
        return result
    result = values[0]
    for op, value in zip(ops, values[1:]):
        if op == "*":
            result = result * value
        elif op == "/":
            result = result / value
        elif op == "+":
            result = result + value
        else:
            result = result - value
    return result


def _evaluate(node, p):
    if isinstance(node, (int, float)):
        return node
    if isinstance(node, str):
        return p
    tokens = list(node)
    if len(tokens) == 2 and tokens[0] in FUNCTIONS:
        return FUNCTIONS[tokens[0]](_evaluate(tokens[1], p))
    if len(tokens) == 1:
        return _evaluate(tokens[0], p)
    return _fold(tokens, p)


class KRule(object):
    """Number of defectives as a function of the population size."""

    def __init__(self, text):
        self.text = str(text).strip()
        try:
            self._tree = k_rule.parse_string(self.text)
        except ParseException as e:
            raise ParsingError(
                "Cannot parse k-rule '{}': {}".format(text, e))

    def __call__(self, p):
        """Evaluate the rule at p.

        Raises
        ------
        ParsingError
            If the rule does not evaluate to a positive integer.
        """
        try:
            value = _evaluate(self._tree[0], p)
        except (ValueError, ZeroDivisionError, OverflowError) as e:
            raise ParsingError(
                "k-rule '{}' cannot be evaluated at p={}: {}".format(
                    self.text, p, e))
        if isinstance(value, float):
            if abs(value - round(value)) > 1e-9:
                raise ParsingError(
                    "k-rule '{}' gives non-integer k={} at p={}; "
                    "wrap it in ceil(...) or floor(...)".format(
                        self.text, value, p))
            value = int(round(value))
        if value < 1:
            raise ParsingError(
                "k-rule '{}' gives k={} < 1 at p={}".format(
                    self.text, value, p))
        return int(value)

    def __str__(self):
        return self.text

    def __repr__(self):
        return "KRule('{}')".format(self.text)


def parse_k_rule(text):
    """Parse a k-rule (an int is accepted as a constant rule)."""
    if isinstance(text, int):
        text = str(text)
    return KRule(text)
