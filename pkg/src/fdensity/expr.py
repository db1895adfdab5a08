"""Parser for the modulus and set expression languages.

Moduli::

    id | scale(a) | pow(p) | log1p | ratio | cantor_ext | lemma(<set>, k)
    | compose(e1, e2) | lin(a, e1, b, e2) | max(e1, e2)

Sets::

    squares | evens | odds | pow2 | finite[1,2,3] | compl(e) | union(e1, e2)
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import density, modulus
from .errors import FDensityError, ParseError

_TOKEN = re.compile(r"\s*(?:(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<punct>[(),\[\]]))")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list:
    tokens, pos = [], 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            bad = src[pos:].lstrip()
            at = len(src) - len(bad)
            raise ParseError(f"unexpected character {bad[0]!r} at position {at}", bad[0], at)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, what):
        t = self.tok
        shown = t.text or "end of input"
        raise ParseError(f"expected {what} but found {shown!r} at position {t.pos} in {self.src!r}",
                         shown, t.pos)

    def expect(self, text):
        if self.tok.text != text:
            self.fail(repr(text))
        self.i += 1

    def number(self):
        if self.tok.kind != "num":
            self.fail("a number")
        t = self.tok
        self.i += 1
        return float(t.text) if any(c in t.text for c in ".eE") else int(t.text)

    def name(self):
        if self.tok.kind != "name":
            self.fail("a name")
        t = self.tok
        self.i += 1
        return t

    def done(self):
        if self.tok.kind != "end":
            self.fail("end of input")

    def build(self, ctor, t, *args):
        try:
            return ctor(*args)
        except FDensityError as exc:
            raise ParseError(f"{t.text}: {exc}", t.text, t.pos) from exc

    # sets ---------------------------------------------------------------
    def set_expr(self):
        t = self.name()
        key = t.text
        if key in _SET_ATOMS:
            return _SET_ATOMS[key]()
        if key == "finite":
            self.expect("[")
            vals = []
            if self.tok.text != "]":
                vals.append(self.int_value())
                while self.tok.text == ",":
                    self.i += 1
                    vals.append(self.int_value())
            self.expect("]")
            return self.build(density.finite, t, vals)
        if key == "compl":
            self.expect("(")
            inner = self.set_expr()
            self.expect(")")
            return density.complement(inner)
        if key == "union":
            self.expect("(")
            a = self.set_expr()
            self.expect(",")
            b = self.set_expr()
            self.expect(")")
            return density.union(a, b)
        self.i -= 1
        self.fail("a set expression")

    def int_value(self):
        t = self.tok
        v = self.number()
        if not isinstance(v, int):
            raise ParseError(f"expected an integer but found {t.text!r} at position {t.pos}",
                             t.text, t.pos)
        return v

    # moduli -------------------------------------------------------------
    def modulus_expr(self):
        t = self.name()
        key = t.text
        if key in _MODULUS_ATOMS:
            return _MODULUS_ATOMS[key]()
        if key == "scale":
            self.expect("(")
            a = self.number()
            self.expect(")")
            return self.build(modulus.scale, t, a)
        if key == "pow":
            self.expect("(")
            p = self.number()
            self.expect(")")
            return self.build(modulus.power, t, p)
        if key == "lemma":
            self.expect("(")
            K = self.set_expr()
            self.expect(",")
            k = self.int_value()
            self.expect(")")
            return self.build(lambda: modulus.lemma_modulus_from_set(K, k)[0], t)
        if key == "compose":
            self.expect("(")
            a = self.modulus_expr()
            self.expect(",")
            b = self.modulus_expr()
            self.expect(")")
            return modulus.combine("compose", a, b)
        if key == "max":
            self.expect("(")
            a = self.modulus_expr()
            self.expect(",")
            b = self.modulus_expr()
            self.expect(")")
            return modulus.combine("max", a, b)
        if key == "lin":
            self.expect("(")
            a = self.number()
            self.expect(",")
            e1 = self.modulus_expr()
            self.expect(",")
            b = self.number()
            self.expect(",")
            e2 = self.modulus_expr()
            self.expect(")")
            return self.build(modulus.combine, t, "linear", e1, e2, a, b)
        self.i -= 1
        self.fail("a modulus expression")


_SET_ATOMS = {
    "squares": density.squares,
    "evens": density.evens,
    "odds": density.odds,
    "pow2": density.powers_of_two,
}

_MODULUS_ATOMS = {
    "id": modulus.identity,
    "log1p": modulus.log1p,
    "ratio": modulus.bounded_ratio,
    "cantor_ext": modulus.cantor_ext,
}


def parse_set(src: str) -> density.NatSet:
    p = _Parser(src)
    out = p.set_expr()
    p.done()
    return out


def parse_modulus(src: str) -> modulus.Modulus:
    p = _Parser(src)
    out = p.modulus_expr()
    p.done()
    return out


__all__ = ["Token", "parse_modulus", "parse_set", "tokenize"]
