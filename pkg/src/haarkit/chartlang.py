"""Parser and evaluator for the chart-definition language.

A chart file names a parametrisation p: U -> M(R), a box domain U, and an
optional group tag.  Grammar (EBNF):

    chart      = "chart" ident "{" "params" ":" paramlist ";"
                 ["group" ":" grouptag ";"] "matrix" ":" matrix ";" "}"
    paramlist  = param { "," param }
    param      = ident "in" "[" expr "," expr "]"
    grouptag   = "so(2)" | "so(3)" | "o(2)" | "o(3)" | "none"
    matrix     = "[" row { "," row } "]"
    row        = "[" expr { "," expr } "]"
    expr       = term { ("+" | "-") term }
    term       = factor { ("*" | "/") factor }
    factor     = "-" factor | power
    power      = atom [ "^" integer ]
    atom       = number | "pi" | ident | ident "(" expr ")" | "(" expr ")"

Functions: sin cos tan sqrt arccos arcsin.  Bounds must be constant
expressions with lower < upper; matrix entries may use declared parameters
and pi.  Evaluation is tree-walking over numpy scalars or arrays; there is
no compilation and no use of eval().
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sqrt": np.sqrt,
    "arccos": np.arccos,
    "arcsin": np.arcsin,
}

GROUP_TAGS = ("so(2)", "so(3)", "o(2)", "o(3)", "none")


class ChartError(ValueError):
    """Lexical, syntactic, or semantic error in a chart source, with position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# Tokens


PUNCT = set("{}[](),;:+-*/^")


@dataclass(frozen=True)
class Token:
    kind: str  # "number" | "ident" | one of PUNCT | "eof"
    text: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        start_line, start_col = line, col
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (source[j].isdigit() or (source[j] == "." and not seen_dot)):
                if source[j] == ".":
                    seen_dot = True
                j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            tokens.append(Token("number", text, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(Token("ident", source[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch in PUNCT:
            tokens.append(Token(ch, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise ChartError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Num | Pi | Var | Neg | BinOp | Pow | Call


@dataclass(frozen=True)
class Param:
    name: str
    lower: Expr
    upper: Expr


@dataclass(frozen=True)
class ChartAst:
    name: str
    params: tuple[Param, ...]
    group: str | None  # "so(2)" | "so(3)" | "o(2)" | "o(3)" | None
    matrix: tuple[tuple[Expr, ...], ...]


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        # None: no identifiers allowed (bound expressions); otherwise the set
        # of declared parameter names usable in matrix entries.
        self.allowed_vars: set[str] | None = None

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ChartError(message, tok.line, tok.column)

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = tok.text if tok.kind != "eof" else "end of input"
            self.error(f"expected {what or kind!r}, found {found!r}", tok)
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            found = tok.text if tok.kind != "eof" else "end of input"
            self.error(f"expected {word!r}, found {found!r}", tok)
        return self.advance()

    # chart = "chart" ident "{" sections "}"
    def parse_chart(self) -> ChartAst:
        self.expect_keyword("chart")
        name = self.expect("ident", "chart name").text
        self.expect("{")
        self.expect_keyword("params")
        self.expect(":")
        params = self.parse_params()
        self.expect(";")
        group = None
        if self.peek().kind == "ident" and self.peek().text == "group":
            self.advance()
            self.expect(":")
            group = self.parse_group_tag()
            self.expect(";")
        self.expect_keyword("matrix")
        self.expect(":")
        self.allowed_vars = {p.name for p in params}
        matrix = self.parse_matrix()
        self.allowed_vars = None
        self.expect(";")
        self.expect("}")
        self.expect("eof", "end of input")
        return ChartAst(name=name, params=tuple(params), group=group, matrix=matrix)

    def parse_params(self) -> list[Param]:
        params = [self.parse_param()]
        while self.peek().kind == ",":
            self.advance()
            params.append(self.parse_param())
        seen = set()
        for p in params:
            if p.name in seen:
                self.error(f"duplicate parameter {p.name!r}")
            seen.add(p.name)
        return params

    def parse_param(self) -> Param:
        name_tok = self.expect("ident", "parameter name")
        name = name_tok.text
        if name == "pi" or name in FUNCTIONS:
            self.error(f"parameter name {name!r} is reserved", name_tok)
        self.expect_keyword("in")
        self.expect("[")
        lower = self.parse_expr()
        self.expect(",")
        upper = self.parse_expr()
        close = self.expect("]")
        lo = evaluate_expr(lower, {})
        hi = evaluate_expr(upper, {})
        if not (np.isfinite(lo) and np.isfinite(hi)):
            self.error(f"bounds of {name!r} are not finite", name_tok)
        if not lo < hi:
            self.error(f"lower bound of {name!r} must be less than upper bound", close)
        return Param(name=name, lower=lower, upper=upper)

    def parse_group_tag(self) -> str | None:
        tok = self.expect("ident", "group tag")
        if tok.text == "none":
            return None
        if tok.text in ("so", "o"):
            self.expect("(")
            dim_tok = self.expect("number", "group dimension")
            if dim_tok.text not in ("2", "3"):
                self.error(f"unknown group tag {tok.text}({dim_tok.text})", dim_tok)
            self.expect(")")
            return f"{tok.text}({dim_tok.text})"
        self.error(f"unknown group tag {tok.text!r}; expected one of {', '.join(GROUP_TAGS)}", tok)

    def parse_matrix(self) -> tuple[tuple[Expr, ...], ...]:
        open_tok = self.expect("[")
        rows = [self.parse_row()]
        while self.peek().kind == ",":
            self.advance()
            row_tok = self.peek()
            rows.append(self.parse_row())
            if len(rows[-1]) != len(rows[0]):
                self.error(
                    f"ragged matrix: row {len(rows)} has {len(rows[-1])} entries, "
                    f"expected {len(rows[0])}", row_tok)
        self.expect("]")
        if not rows or not rows[0]:
            self.error("matrix must have at least one entry", open_tok)
        return tuple(tuple(r) for r in rows)

    def parse_row(self) -> list[Expr]:
        self.expect("[")
        entries = [self.parse_expr()]
        while self.peek().kind == ",":
            self.advance()
            entries.append(self.parse_expr())
        self.expect("]")
        return entries

    # expr = term { ("+"|"-") term }
    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            node = BinOp(op, node, self.parse_factor())
        return node

    def parse_factor(self) -> Expr:
        if self.peek().kind == "-":
            self.advance()
            return Neg(self.parse_factor())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.peek().kind == "^":
            caret = self.advance()
            negative = False
            if self.peek().kind == "-":
                self.advance()
                negative = True
            exp_tok = self.peek()
            if exp_tok.kind != "number" or not exp_tok.text.isdigit():
                self.error("exponent must be an integer literal", exp_tok if exp_tok.kind != "eof" else caret)
            self.advance()
            exponent = int(exp_tok.text)
            return Pow(base, -exponent if negative else exponent)
        return base

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")")
            return node
        if tok.kind == "ident":
            self.advance()
            if tok.text == "pi":
                return Pi()
            if self.peek().kind == "(":
                if tok.text not in FUNCTIONS:
                    self.error(f"unknown function {tok.text!r}", tok)
                self.advance()
                arg = self.parse_expr()
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text in FUNCTIONS:
                self.error(f"function {tok.text!r} needs an argument list", tok)
            if self.allowed_vars is None:
                self.error(f"identifier {tok.text!r} is not allowed in a constant bound", tok)
            if tok.text not in self.allowed_vars:
                self.error(f"unknown identifier {tok.text!r}; not a declared parameter", tok)
            return Var(tok.text)
        found = tok.text if tok.kind != "eof" else "end of input"
        self.error(f"expected an expression, found {found!r}", tok)


def parse_chart(source: str) -> ChartAst:
    """Parse chart source text into an AST, enforcing all semantic checks."""
    return _Parser(tokenize(source)).parse_chart()


# ---------------------------------------------------------------------------
# Evaluation


def evaluate_expr(node: Expr, env: dict[str, float | np.ndarray]):
    """Evaluate an expression tree over an environment of scalars or arrays."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Pi):
        return np.pi
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -evaluate_expr(node.arg, env)
    if isinstance(node, BinOp):
        left = evaluate_expr(node.left, env)
        right = evaluate_expr(node.right, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        return left / right
    if isinstance(node, Pow):
        return evaluate_expr(node.base, env) ** node.exponent
    if isinstance(node, Call):
        return FUNCTIONS[node.func](evaluate_expr(node.arg, env))
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Printing.  print_chart(parse_chart(s)) reparses to an equal AST.


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _format_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def print_expr(node: Expr, parent_prec: int = 0) -> str:
    if isinstance(node, Num):
        text, prec = _format_number(node.value), _PREC["atom"]
    elif isinstance(node, Pi):
        text, prec = "pi", _PREC["atom"]
    elif isinstance(node, Var):
        text, prec = node.name, _PREC["atom"]
    elif isinstance(node, Call):
        text, prec = f"{node.func}({print_expr(node.arg)})", _PREC["atom"]
    elif isinstance(node, Neg):
        prec = _PREC["neg"]
        text = "-" + print_expr(node.arg, prec)
    elif isinstance(node, Pow):
        prec = _PREC["^"]
        # exponent grammar takes a literal; negative exponents print as ^-k
        text = print_expr(node.base, prec + 1) + "^" + str(node.exponent)
    elif isinstance(node, BinOp):
        prec = _PREC[node.op]
        # left-associative: right operand needs strictly higher precedence
        left = print_expr(node.left, prec)
        right = print_expr(node.right, prec + 1)
        text = f"{left} {node.op} {right}"
    else:
        raise TypeError(f"not an expression node: {node!r}")
    if prec < parent_prec:
        return f"({text})"
    return text


def print_chart(ast: ChartAst) -> str:
    """Render an AST back to canonical chart source."""
    lines = [f"chart {ast.name} {{"]
    params = ", ".join(
        f"{p.name} in [{print_expr(p.lower)}, {print_expr(p.upper)}]" for p in ast.params)
    lines.append(f"  params: {params};")
    if ast.group is not None:
        lines.append(f"  group: {ast.group};")
    lines.append("  matrix: [")
    for i, row in enumerate(ast.matrix):
        comma = "," if i + 1 < len(ast.matrix) else ""
        lines.append("    [" + ", ".join(print_expr(e) for e in row) + "]" + comma)
    lines.append("  ];")
    lines.append("}")
    return "\n".join(lines) + "\n"
