"""State specifications and their text grammar.

Grammar (whitespace-insensitive, kind case-insensitive)::

    spec    := kind [':' arg (',' arg)*]
    kind    := fock | coherent | thermal | squeezed | cat | vacuum
    arg     := real | complex
    complex := real ('+'|'-') [real] 'i'  |  [real] 'i'  |  real

Examples: ``fock:3``, ``coherent:1.0+0.5i``, ``squeezed:0.4,0``, ``cat:1.5,0``.
"""

import math
import re
from dataclasses import dataclass

from .errors import (
    ArityError,
    ComplexLiteralError,
    ParameterRangeError,
    StateSpecError,
    UnknownKindError,
)

# kind -> argument kinds ('int', 'real', 'complex')
KINDS = {
    "vacuum": (),
    "fock": ("int",),
    "coherent": ("complex",),
    "thermal": ("real",),
    "squeezed": ("real", "real"),
    "cat": ("complex", "real"),
}

_REAL = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"^(?P<re>[+-]?{_REAL})?(?:(?P<isign>[+-])(?P<im>{_REAL})?i|(?P<ionly>i))?$"
)


@dataclass(frozen=True)
class StateSpec:
    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnknownKindError(f"unknown state kind {self.kind!r}", 0)
        if len(self.params) != len(KINDS[self.kind]):
            raise ArityError(
                f"{self.kind} takes {len(KINDS[self.kind])} argument(s), "
                f"got {len(self.params)}",
                0,
            )
        _check_ranges(self.kind, self.params, [0] * len(self.params))

    def __str__(self):
        if not self.params:
            return self.kind
        return f"{self.kind}:" + ",".join(_format_arg(p) for p in self.params)

    @classmethod
    def fock(cls, n):
        return cls("fock", (int(n),))

    @classmethod
    def coherent(cls, alpha):
        return cls("coherent", (complex(alpha),))

    @classmethod
    def thermal(cls, nbar):
        return cls("thermal", (float(nbar),))

    @classmethod
    def squeezed(cls, r, phi=0.0):
        return cls("squeezed", (float(r), float(phi)))

    @classmethod
    def cat(cls, alpha, phase=0.0):
        return cls("cat", (complex(alpha), float(phase)))

    @classmethod
    def vacuum(cls):
        return cls("vacuum", ())


def _format_arg(value):
    if isinstance(value, complex):
        if value.imag == 0:
            return repr(value.real)
        sign = "+" if value.imag >= 0 else "-"
        return f"{value.real!r}{sign}{abs(value.imag)!r}i"
    return repr(value)


def _check_ranges(kind, params, positions):
    for value, pos in zip(params, positions):
        v = value if isinstance(value, (int, float)) else None
        if isinstance(value, complex):
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise ParameterRangeError(f"{kind} argument must be finite", pos)
        elif not math.isfinite(v):
            raise ParameterRangeError(f"{kind} argument must be finite", pos)
    if kind == "fock" and params[0] < 0:
        raise ParameterRangeError("fock requires n >= 0", positions[0])
    if kind == "thermal" and params[0] < 0:
        raise ParameterRangeError("thermal requires n̄ >= 0", positions[0])
    if kind == "squeezed" and params[0] < 0:
        raise ParameterRangeError("squeezed requires r >= 0", positions[0])


def parse_complex(text, offset=0):
    """Parse ``a+bi`` style literals (whitespace already removed)."""
    m = _COMPLEX_RE.match(text)
    if not text or m is None or not (m.group("re") or m.group("isign") or m.group("ionly")):
        raise ComplexLiteralError(f"malformed number {text!r}", offset)
    re_part = float(m.group("re")) if m.group("re") else 0.0
    if m.group("ionly"):
        # "2i" is matched as re="2" followed by "i"; treat as pure imaginary
        return complex(0.0, re_part if m.group("re") else 1.0)
    if m.group("isign"):
        im = float(m.group("im")) if m.group("im") else 1.0
        return complex(re_part, -im if m.group("isign") == "-" else im)
    return complex(re_part, 0.0)


def parse_state_spec(text):
    """Parse one state specification; raises a positioned StateSpecError."""
    if not isinstance(text, str):
        raise StateSpecError("state specification must be a string", 0)
    # keep the original index of every non-blank character for error positions
    index = [i for i, ch in enumerate(text) if not ch.isspace()]
    s = "".join(text[i] for i in index)

    def pos(k):
        if not index:
            return 0
        return index[k] if k < len(index) else index[-1] + 1

    if not s:
        raise StateSpecError("empty state specification", 0)
    kind_text, colon, rest = s.partition(":")
    kind = kind_text.lower()
    if kind not in KINDS:
        raise UnknownKindError(
            f"unknown state kind {kind_text!r}; expected one of {', '.join(KINDS)}", pos(0)
        )
    expected = KINDS[kind]
    start = len(kind_text) + 1
    pieces = rest.split(",") if colon else []
    if colon and rest == "":
        raise ArityError(f"{kind} takes {len(expected)} argument(s), got 0", pos(start))
    if len(pieces) != len(expected):
        raise ArityError(
            f"{kind} takes {len(expected)} argument(s), got {len(pieces)}", pos(start)
        )
    params, positions = [], []
    cursor = start
    for piece, want in zip(pieces, expected):
        at = pos(cursor)
        value = parse_complex(piece, at)
        if want != "complex" and value.imag != 0:
            raise ParameterRangeError(f"{kind} argument {piece!r} must be real", at)
        if want == "int":
            if value.real != int(value.real) or not re.fullmatch(r"[+-]?\d+", piece):
                raise ParameterRangeError(f"{kind} argument {piece!r} must be an integer", at)
            value = int(piece)
        elif want == "real":
            value = value.real
        params.append(value)
        positions.append(at)
        cursor += len(piece) + 1
    _check_ranges(kind, params, positions)
    return StateSpec(kind, tuple(params))


def parse_state_list(text):
    """Parse a comma-separated list of specs such as ``vacuum,fock:1,squeezed:0.4,0``.

    A comma-separated token without ``:`` that is not a kind name continues
    the argument list of the preceding spec.
    """
    groups = []
    for token in text.split(","):
        head = token.strip().lower()
        if ":" in token or head in KINDS or not groups:
            groups.append(token)
        else:
            groups[-1] += "," + token
    return [parse_state_spec(g) for g in groups]
