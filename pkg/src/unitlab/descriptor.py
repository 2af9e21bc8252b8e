"""Group descriptors such as ``C8 Y D8`` or ``(D8 x C2)``.

Grammar (whitespace ignored)::

    expr := term { ("x" | "Y") term }        left-associative
    term := atom | "(" expr ")"
    atom := "C"n | "D"n | "Q8" | "M"n | "H"p | "MOD"p","m
"""

from __future__ import annotations

import re

from .groups import (
    CentralProduct,
    Cyclic,
    Dihedral,
    DirectProduct,
    Group,
    GroupError,
    GroupSpec,
    Heisenberg,
    Modular,
    Quaternion,
    construct_group,
    prime_of_power,
    spec_text,
)


class DescriptorError(ValueError):
    def __init__(self, msg: str, text: str = "", pos: int | None = None):
        if pos is not None:
            msg = f"{msg} at position {pos}: {text[:pos]}<here>{text[pos:]}"
        super().__init__(msg)
        self.pos = pos


_TOKEN = re.compile(r"MOD(\d+),(\d+)|([CDQMH])(\d+)|([xY()])")


def _tokens(text: str) -> list[tuple[str, object, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise DescriptorError("unexpected character", text, pos)
        if m.group(1):
            out.append(("atom", ("MOD", int(m.group(1)), int(m.group(2))), pos))
        elif m.group(3):
            out.append(("atom", (m.group(3), int(m.group(4))), pos))
        else:
            out.append((m.group(5), None, pos))
        pos = m.end()
    return out


def _atom(val: tuple, text: str, pos: int) -> GroupSpec:
    try:
        match val:
            case ("MOD", p, m):
                return Modular(p, m)
            case ("C", n):
                return Cyclic(n)
            case ("D", n):
                return Dihedral(n)
            case ("Q", 8):
                return Quaternion()
            case ("Q", n):
                raise GroupError(f"Q{n}: only Q8 is supported")
            case ("M", n):
                if prime_of_power(n) != 2 or n < 8:
                    raise GroupError(f"M{n}: need n = 2^(m+2) with m >= 1")
                return Modular(2, n.bit_length() - 3)
            case ("H", p):
                return Heisenberg(p)
    except GroupError as exc:
        raise DescriptorError(str(exc), text, pos) from None
    raise DescriptorError("unknown atom", text, pos)  # pragma: no cover


def parse_descriptor(text: str) -> GroupSpec:
    toks = _tokens(text)
    i = 0

    def peek():
        return toks[i] if i < len(toks) else (None, None, len(text))

    def term():
        nonlocal i
        kind, val, pos = peek()
        if kind == "atom":
            i += 1
            return _atom(val, text, pos)
        if kind == "(":
            i += 1
            node = expr()
            if peek()[0] != ")":
                raise DescriptorError("expected ')'", text, peek()[2])
            i += 1
            return node
        raise DescriptorError("expected a group", text, pos)

    def expr():
        nonlocal i
        node = term()
        while peek()[0] in ("x", "Y"):
            op, _, pos = peek()
            i += 1
            right = term()
            try:
                node = DirectProduct(node, right) if op == "x" else CentralProduct(node, right)
            except GroupError as exc:
                raise DescriptorError(str(exc), text, pos) from None
        return node

    spec = expr()
    if i != len(toks):
        raise DescriptorError("trailing input", text, toks[i][2])
    return spec


def render_descriptor(spec: GroupSpec) -> str:
    return spec_text(spec)


def build(text: str) -> Group:
    """Parse and construct in one step."""
    return construct_group(parse_descriptor(text))
