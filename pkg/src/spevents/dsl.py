"""Line-oriented scenario language.

Grammar (one declaration per line, ``#`` starts a comment)::

    scenario   := header? decl*
    header     := "scenario" NAME STRING?
    decl       := particle | node
    particle   := "particle" ID "at" point ("vel" expr)+
    node       := "node" KIND "at" point "on" ID ("," ID)* param*
    point      := "(" expr "," expr ")"            # (t, x)
    param      := NAME "=" value
    value      := expr | NAME | "[" (value ("," value)*)? "]"
    expr       := term (("+" | "-") term)*
    term       := unary (("*" | "/") unary)*
    unary      := ("+" | "-") unary | atom
    atom       := NUMBER | NUMBER "j" | "pi" | "sqrt" "(" expr ")" | "(" expr ")"

``KIND`` is one of ``pair bs mirror polarizer detector gate``. Particle ids
are names or non-negative integers.
"""

from __future__ import annotations

import re
from cmath import sqrt as csqrt
from dataclasses import dataclass
from math import pi
from typing import Iterator

import numpy as np

from .errors import ParseError, ValidationError
from .qcore import BellKind
from .scenario import (
    LIGHTSPEED,
    BeamSplitterBellMeasure,
    Detector,
    Gate,
    InferredEvent,
    InteractionNode,
    MirrorSeparableMeasure,
    Particle,
    Polarizer,
    PreparePair,
    Scenario,
    validate,
)

_S2 = 1 / np.sqrt(2)
NAMED_GATES = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
    "H": np.array([[_S2, _S2], [_S2, -_S2]]),
    "S": np.diag([1, 1j]),
    "T": np.diag([1, np.exp(1j * pi / 4)]),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
    "CZ": np.diag([1, 1, 1, -1]),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#.*)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?j?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<punct>[(),=\[\]+\-*/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # number, name, string, punct, eol
    text: str
    line: int
    column: int


def tokenize_line(text: str, line: int) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1, "a token")
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos + 1))
        pos = m.end()
    tokens.append(Token("eol", "", line, len(text) + 1))
    return tokens


class _LineParser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, expected: str = "", tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column, expected)

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eol":
            self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "name") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"found {self._shown()}", repr(text))
        return self.advance()

    def _shown(self) -> str:
        return "end of line" if self.tok.kind == "eol" else repr(self.tok.text)

    def end(self):
        if self.tok.kind != "eol":
            raise self.error(f"unexpected trailing {self._shown()}", "end of line")

    def name(self, what: str = "a name") -> Token:
        if self.tok.kind != "name":
            raise self.error(f"found {self._shown()}", what)
        return self.advance()

    def ident(self) -> Token:
        tok = self.tok
        if tok.kind == "name" or (tok.kind == "number" and tok.text.isdigit()):
            return self.advance()
        raise self.error(f"found {self._shown()}", "a particle id")

    # expressions
    def expr(self) -> complex:
        value = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> complex:
        value = self.unary()
        while self.at("*") or self.at("/"):
            op_tok = self.advance()
            rhs = self.unary()
            if op_tok.text == "/":
                if rhs == 0:
                    raise self.error("division by zero", tok=op_tok)
                value = value / rhs
            else:
                value = value * rhs
        return value

    def unary(self) -> complex:
        if self.at("-"):
            self.advance()
            return -self.unary()
        if self.at("+"):
            self.advance()
            return self.unary()
        return self.atom()

    def atom(self) -> complex:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            if tok.text.endswith("j"):
                return complex(0, float(tok.text[:-1]))
            return complex(float(tok.text))
        if self.at("pi"):
            self.advance()
            return complex(pi)
        if self.at("sqrt"):
            self.advance()
            self.expect("(")
            value = self.expr()
            self.expect(")")
            return complex(csqrt(value))
        if self.at("("):
            self.advance()
            value = self.expr()
            self.expect(")")
            return value
        raise self.error(f"found {self._shown()}", "a number")

    def real(self) -> float:
        tok = self.tok
        value = self.expr()
        if value.imag != 0:
            raise self.error("expected a real value", "a real number", tok)
        return value.real

    def point(self) -> InferredEvent:
        self.expect("(")
        t = self.real()
        self.expect(",")
        x = self.real()
        self.expect(")")
        return InferredEvent(t, x)

    def value(self):
        """Returns ``(token, python value)`` where names stay strings and lists are lists."""
        tok = self.tok
        if self.at("["):
            self.advance()
            items = []
            if not self.at("]"):
                items.append(self.value()[1])
                while self.at(","):
                    self.advance()
                    items.append(self.value()[1])
            self.expect("]")
            return tok, items
        if tok.kind == "name" and tok.text not in ("pi", "sqrt"):
            self.advance()
            return tok, tok.text
        return tok, self.expr()


def _parse_particle(p: _LineParser) -> Particle:
    pid = p.ident().text
    p.expect("at")
    birth = p.point()
    vels = []
    if not p.at("vel"):
        raise p.error(f"found {p._shown()}", "'vel'")
    while p.at("vel"):
        p.advance()
        tok = p.tok
        v = p.real()
        if abs(v) > LIGHTSPEED:
            raise p.error(f"velocity {v!r} exceeds light speed", f"|v| <= {LIGHTSPEED:g}", tok)
        vels.append(v)
    p.end()
    return Particle(pid, birth, tuple(vels))


def _int_param(tok: Token, value, what: str) -> int:
    if isinstance(value, complex) and value.imag == 0 and value.real == int(value.real):
        return int(value.real)
    raise ParseError(f"{what} must be an integer", tok.line, tok.column, "an integer")


def _real_param(tok: Token, value, what: str) -> float:
    if isinstance(value, complex) and value.imag == 0:
        return value.real
    raise ParseError(f"{what} must be a real number", tok.line, tok.column, "a real number")


def _bell_param(tok: Token, value) -> BellKind:
    try:
        return BellKind(value)
    except ValueError:
        names = ", ".join(k.value for k in BellKind)
        raise ParseError(f"unknown Bell state {value!r}", tok.line, tok.column, names) from None


def _matrix_param(tok: Token, value) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ParseError("matrix must be a list of rows", tok.line, tok.column, "[[...], ...]")
    if not all(isinstance(v, complex) for r in value for v in r):
        raise ParseError("matrix entries must be numbers", tok.line, tok.column, "a number")
    if len({len(r) for r in value}) != 1:
        raise ParseError("matrix rows differ in length", tok.line, tok.column, "equal-length rows")
    return np.array(value, dtype=complex)


def _named_op(tok: Token, value) -> tuple[np.ndarray, tuple[str, ...]]:
    names = value if isinstance(value, list) else [value]
    if not names or not all(isinstance(n, str) for n in names):
        raise ParseError("op must be a gate name or a list of names", tok.line, tok.column, "gate name")
    mats = []
    for n in names:
        if n not in NAMED_GATES:
            raise ParseError(f"unknown gate {n!r}", tok.line, tok.column, ", ".join(NAMED_GATES))
        mats.append(NAMED_GATES[n])
    m = mats[0]
    for extra in mats[1:]:
        m = np.kron(m, extra)
    return np.asarray(m, dtype=complex), tuple(names)


_ALLOWED = {
    "pair": {"kind"},
    "bs": {"outcome"},
    "mirror": {"outcome"},
    "polarizer": {"angle", "outcome"},
    "detector": {"outcome"},
    "gate": {"op", "matrix"},
}


def _build_kind(keyword: str, kw_tok: Token, params: dict):
    allowed = _ALLOWED[keyword]
    for key, (ktok, _, _) in params.items():
        if key not in allowed:
            raise ParseError(f"unknown parameter {key!r} for {keyword}", ktok.line, ktok.column,
                             ", ".join(sorted(allowed)))

    def get(key):
        entry = params.get(key)
        return (None, None) if entry is None else (entry[1], entry[2])

    if keyword == "pair":
        tok, v = get("kind")
        if tok is None:
            raise ParseError("pair needs kind=<Bell state>", kw_tok.line, kw_tok.column, "kind=...")
        return PreparePair(_bell_param(tok, v))
    if keyword in ("bs", "mirror"):
        tok, v = get("outcome")
        outcome = None
        if tok is not None:
            if keyword == "bs" and isinstance(v, str):
                outcome = _bell_param(tok, v).outcome_index
            else:
                outcome = _int_param(tok, v, "outcome")
        return BeamSplitterBellMeasure(outcome) if keyword == "bs" else MirrorSeparableMeasure(outcome)
    if keyword == "polarizer":
        tok, v = get("angle")
        if tok is None:
            raise ParseError("polarizer needs angle=<radians>", kw_tok.line, kw_tok.column, "angle=...")
        angle = _real_param(tok, v, "angle")
        otok, ov = get("outcome")
        passes = True
        if otok is not None:
            if ov not in ("pass", "absorb"):
                raise ParseError("polarizer outcome must be pass or absorb", otok.line, otok.column,
                                 "pass, absorb")
            passes = ov == "pass"
        return Polarizer(angle, passes)
    if keyword == "detector":
        tok, v = get("outcome")
        return Detector(None if tok is None else _int_param(tok, v, "outcome"))
    # gate
    op_tok, op_v = get("op")
    m_tok, m_v = get("matrix")
    if (op_tok is None) == (m_tok is None):
        raise ParseError("gate needs exactly one of op=... or matrix=...", kw_tok.line, kw_tok.column,
                         "op=... or matrix=...")
    if op_tok is not None:
        m, label = _named_op(op_tok, op_v)
        return Gate.from_array(m, label)
    return Gate.from_array(_matrix_param(m_tok, m_v))


def _parse_node(p: _LineParser) -> InteractionNode:
    kw_tok = p.name("a node kind")
    if kw_tok.text not in _ALLOWED:
        raise p.error(f"unknown node kind {kw_tok.text!r}", ", ".join(_ALLOWED), kw_tok)
    p.expect("at")
    at = p.point()
    p.expect("on")
    parts = [p.ident().text]
    while p.at(","):
        p.advance()
        parts.append(p.ident().text)
    params: dict[str, tuple] = {}
    while p.tok.kind != "eol":
        key = p.name("a parameter name or end of line")
        p.expect("=")
        vtok, value = p.value()
        if key.text in params:
            raise p.error(f"duplicate parameter {key.text!r}", tok=key)
        params[key.text] = (key, vtok, value)
    return InteractionNode(at, tuple(parts), _build_kind(kw_tok.text, kw_tok, params))


def _unquote(text: str) -> str:
    return re.sub(r"\\(.)", r"\1", text[1:-1])


def parse(text: str, check: bool = True) -> Scenario:
    """Parse scenario text; raises :class:`ParseError` or, if ``check``, :class:`ValidationError`."""
    particles: list[Particle] = []
    nodes: list[InteractionNode] = []
    name, description = "unnamed", ""
    seen_decl = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = tokenize_line(raw, lineno)
        if tokens[0].kind == "eol":
            continue
        p = _LineParser(tokens)
        head = p.tok
        if head.kind == "name" and head.text == "scenario":
            if seen_decl:
                raise p.error("scenario header must come first", "'particle' or 'node'")
            p.advance()
            name = p.name("a scenario name").text
            if p.tok.kind == "string":
                description = _unquote(p.advance().text)
            p.end()
        elif head.kind == "name" and head.text == "particle":
            p.advance()
            particles.append(_parse_particle(p))
        elif head.kind == "name" and head.text == "node":
            p.advance()
            nodes.append(_parse_node(p))
            p.end()
        else:
            raise p.error(f"found {p._shown()}", "'scenario', 'particle' or 'node'")
        seen_decl = True
    if not particles and not nodes:
        raise ParseError("no declarations", 1, 1, "'particle' or 'node'")
    sc = Scenario(tuple(particles), tuple(nodes), name, description)
    if check:
        violations = validate(sc)
        if violations:
            raise ValidationError(violations)
    return sc


# -- canonical serializer --------------------------------------------------------------------

def _num(v: float) -> str:
    v = float(v) + 0.0
    return repr(v)


def _cnum(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return _num(c.real)
    if c.real == 0:
        return f"{_num(c.imag)}j" if c.imag >= 0 else f"-{_num(-c.imag)}j"
    sign = "+" if c.imag >= 0 else "-"
    return f"{_num(c.real)}{sign}{_num(abs(c.imag))}j"


def _kind_params(kind) -> list[str]:
    if isinstance(kind, PreparePair):
        return [f"kind={kind.bell.value}"]
    if isinstance(kind, (BeamSplitterBellMeasure, MirrorSeparableMeasure, Detector)):
        return [] if kind.outcome is None else [f"outcome={kind.outcome}"]
    if isinstance(kind, Polarizer):
        return [f"angle={_num(kind.angle)}", f"outcome={'pass' if kind.passes else 'absorb'}"]
    if isinstance(kind, Gate):
        if kind.label:
            label = kind.label[0] if len(kind.label) == 1 else "[" + ", ".join(kind.label) + "]"
            return [f"op={label}"]
        rows = ", ".join("[" + ", ".join(_cnum(v) for v in row) + "]" for row in kind.matrix)
        return [f"matrix=[{rows}]"]
    raise TypeError(f"unknown node kind {kind!r}")


def _lines(sc: Scenario) -> Iterator[str]:
    desc = sc.description.replace("\\", "\\\\").replace('"', '\\"')
    yield f'scenario {sc.name} "{desc}"' if sc.description else f"scenario {sc.name}"
    for p in sc.particles:
        vels = " ".join(f"vel {_num(v)}" for v in p.velocities)
        yield f"particle {p.id} at ({_num(p.birth.t)}, {_num(p.birth.x)}) {vels}"
    for n in sc.nodes:
        parts = ", ".join(n.participants)
        tail = " ".join(_kind_params(n.kind))
        line = f"node {n.kind.keyword} at ({_num(n.at.t)}, {_num(n.at.x)}) on {parts}"
        yield f"{line} {tail}" if tail else line


def render(sc: Scenario) -> str:
    """Canonical text form; ``parse(render(sc)) == sc``."""
    return "\n".join(_lines(sc)) + "\n"
