"""Problem-file parsing, command dispatch, and text/JSON/LaTeX emitters.

A problem file is line oriented.  Blank lines and ``#`` comments are
ignored.  The directives are::

    field Q            (or: field Q(i))
    gens x1 x2
    rel <expr>         (zero or more, one quadratic relation each)
    p12 <scalar>
    p11 <scalar>
    sigma x1 = [[e, e], [e, e]]    (e: linear expression, one line per gen)
    nu x1 = [q, q]                 (q: quadratic lift, optional, default 0)

Scalars are ``a``, ``a/b``, ``i``, ``a+b*i`` or ``a-b*i`` with rational
parts.  Inside expressions a composite scalar must be parenthesized, as
in ``(1+2*i)*x1*x2``; terms are joined by ``+`` and ``-``.

Exit codes: 0 success, 1 validation failure, 2 parse error, 3 a
guaranteed internal identity failed.
"""

import argparse
import json
import random
import re
import sys
from fractions import Fraction

from .blockcalc import BlockMap, Lin
from .exact_linalg import (
    IUNIT,
    ONE,
    DorexError,
    InternalCheckError,
    Scalar,
    Subspace,
    Tensor,
    ValidationError,
    format_scalar,
)
from .extension import ExtensionInput, build_B, power_identity_report, validate
from .nakayama import nakayama_report
from .potential import build_omega_hat, derivation_quotient_check, verify_twisted
from .qalgebra import (
    AlgebraCache,
    NotRegularEvidence,
    Presentation,
    as_certificate,
)
from .quadruple import (
    build_quadruple,
    perturb_extension,
    row_relation_report,
    sum_identity_report,
)
from .resolution import assemble_F, chain_identity_report, verify_resolution

__all__ = [
    "COMMANDS",
    "FieldMismatch",
    "ParseError",
    "ProblemSpec",
    "emit_payload",
    "emit_problem",
    "main",
    "parse_input",
    "run_command",
    "tensor_from_json",
    "tensor_to_json",
]

COMMANDS = (
    "analyze",
    "validate",
    "quadruple",
    "nakayama",
    "resolution",
    "superpotential",
    "verify",
)

RESERVED_NAMES = ("i", "y1", "y2")


class ParseError(DorexError):
    """Problem-file syntax error with a source position."""

    def __init__(self, line, column, expected, found=None):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        message = "line %d, column %d: expected %s" % (line, column, expected)
        if found is not None:
            message += ", found %r" % (found,)
        super().__init__(message)


class FieldMismatch(ParseError):
    """The imaginary unit appeared in a problem declared over Q."""

    def __init__(self, line, column):
        super().__init__(
            line, column, "a rational scalar (i needs `field Q(i)`)", found="i"
        )


# tokens --------------------------------------------------------------------

_NUM = re.compile(r"\d+(?:/\d+)?")
_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PUNCT = "[](),=*+-"


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


class _Stream:
    """One line of tokens with single-token lookahead and error helpers."""

    def __init__(self, text, lineno):
        body = text.split("#", 1)[0]
        self.line = lineno
        self.end_col = len(body.rstrip()) + 1
        self.toks = []
        self.pos = 0
        col = 0
        while col < len(body):
            ch = body[col]
            if ch.isspace():
                col += 1
                continue
            m = _NUM.match(body, col)
            if m:
                self.toks.append(_Token("num", m.group(), lineno, col + 1))
                col = m.end()
                continue
            m = _WORD.match(body, col)
            if m:
                self.toks.append(_Token("word", m.group(), lineno, col + 1))
                col = m.end()
                continue
            if ch in _PUNCT:
                self.toks.append(_Token(ch, ch, lineno, col + 1))
                col += 1
                continue
            raise ParseError(lineno, col + 1, "a valid token", found=ch)

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self):
        tok = self.peek()
        if tok is not None:
            self.pos += 1
        return tok

    def fail(self, expected):
        tok = self.peek()
        if tok is None:
            raise ParseError(self.line, self.end_col, expected)
        raise ParseError(tok.line, tok.col, expected, tok.text)

    def expect(self, kind, expected):
        tok = self.peek()
        if tok is None or tok.kind != kind:
            self.fail(expected)
        return self.take()

    def done(self):
        if self.peek() is not None:
            self.fail("end of line")


# scalar and expression grammar ---------------------------------------------


def _scalar(st, field):
    """Full scalar: [sign](a | a/b | i) or a(+|-)b*i, rational parts."""
    sign = 1
    tok = st.peek()
    if tok is not None and tok.kind in ("+", "-"):
        st.take()
        sign = -1 if tok.kind == "-" else 1
        tok = st.peek()
    if tok is None:
        st.fail("a scalar")
    if tok.kind == "word":
        if tok.text != "i":
            st.fail("a scalar")
        st.take()
        if field != "Q(i)":
            raise FieldMismatch(tok.line, tok.col)
        return Scalar.from_rationals(Fraction(0), Fraction(sign))
    if tok.kind != "num":
        st.fail("a scalar")
    st.take()
    re_part = Fraction(tok.text) * sign
    sep = st.peek()
    if sep is None or sep.kind not in ("+", "-"):
        return Scalar.from_rationals(re_part, Fraction(0))
    st.take()
    im_sign = -1 if sep.kind == "-" else 1
    btok = st.expect("num", "the imaginary part after %r" % sep.kind)
    st.expect("*", "'*' before i")
    itok = st.expect("word", "the letter i")
    if itok.text != "i":
        raise ParseError(itok.line, itok.col, "the letter i", found=itok.text)
    if field != "Q(i)":
        raise FieldMismatch(itok.line, itok.col)
    return Scalar.from_rationals(re_part, Fraction(btok.text) * im_sign)


def _expression(st, field, gen_index, degree, what):
    """Sum of terms `coef name*...*name`, homogeneous of the given degree.

    A bare 0 is the zero tensor; otherwise every nonzero term must carry
    exactly `degree` generator factors.
    """
    n = len(gen_index)
    total = Tensor.zero(n, degree)
    terms = []
    first = True
    while True:
        tok = st.peek()
        if not first:
            if tok is None or tok.kind in (",", "]", ")"):
                break
            if tok.kind not in ("+", "-"):
                st.fail("'+' or '-' between terms (or '*' inside a term)")
        sign = 1
        if tok is not None and tok.kind in ("+", "-"):
            st.take()
            sign = -1 if tok.kind == "-" else 1
            tok = st.peek()
        start = tok
        if start is None:
            st.fail(what)
        coef = Scalar.from_rationals(Fraction(sign), Fraction(0))
        word = []
        while True:
            tok = st.peek()
            if tok is None:
                st.fail(what)
            if tok.kind == "num":
                st.take()
                coef = coef * Scalar.from_rationals(Fraction(tok.text), Fraction(0))
            elif tok.kind == "(":
                st.take()
                coef = coef * _scalar(st, field)
                st.expect(")", "')' closing the scalar")
            elif tok.kind == "word":
                if tok.text == "i":
                    st.take()
                    if field != "Q(i)":
                        raise FieldMismatch(tok.line, tok.col)
                    coef = coef * IUNIT
                elif tok.text in gen_index:
                    st.take()
                    word.append(gen_index[tok.text])
                else:
                    st.fail("a generator name or scalar")
            else:
                st.fail(what)
            nxt = st.peek()
            if nxt is not None and nxt.kind == "*":
                st.take()
                continue
            break
        terms.append((coef, tuple(word), start))
        first = False
    for coef, word, start in terms:
        if coef.is_zero():
            continue
        if len(word) != degree:
            raise ParseError(
                start.line,
                start.col,
                "a homogeneous degree-%d term" % degree,
                found=start.text,
            )
        total = total + Tensor.word(n, word).scale(coef)
    return total


# problem files --------------------------------------------------------------


class ProblemSpec:
    """Parsed problem data: field, generators, relations, mixing scalars,
    the 2x2 matrix map and the two quadratic lifts per generator."""

    def __init__(self, field, gens, relations, p12, p11, sigma, nu):
        self.field = field
        self.gens = tuple(gens)
        self.relations = tuple(relations)
        self.p12 = p12
        self.p11 = p11
        self.sigma = sigma
        self.nu = nu

    def __eq__(self, other):
        if not isinstance(other, ProblemSpec):
            return NotImplemented
        if self.field != other.field or self.gens != other.gens:
            return False
        if len(self.relations) != len(other.relations):
            return False
        if any(a != b for a, b in zip(self.relations, other.relations)):
            return False
        if self.p12 != other.p12 or self.p11 != other.p11:
            return False
        for g in range(len(self.gens)):
            for s in range(2):
                if self.nu[g][s] != other.nu[g][s]:
                    return False
                for t in range(2):
                    if self.sigma[g][s][t] != other.sigma[g][s][t]:
                        return False
        return True

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def presentation(self):
        n = len(self.gens)
        span = Subspace.from_tensors(n, 2, list(self.relations))
        return Presentation(self.gens, self.field, span)

    def algebra(self):
        return AlgebraCache(self.presentation())

    def extension_input(self):
        return ExtensionInput(self.p12, self.p11, self.sigma, self.nu)


def parse_input(text):
    """Parse a problem file into a ProblemSpec, with source positions on
    every error."""
    field = None
    gens = None
    gen_index = {}
    relations = []
    p12 = None
    p11 = None
    sigma = {}
    nu = {}
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        st = _Stream(raw, lineno)
        head = st.peek()
        if head is None:
            continue
        if head.kind != "word":
            st.fail("a directive (field, gens, rel, p12, p11, sigma, nu)")
        st.take()
        key = head.text
        if key == "field":
            if field is not None:
                raise ParseError(head.line, head.col, "a single field line")
            ftok = st.expect("word", "Q or Q(i)")
            if ftok.text != "Q":
                raise ParseError(ftok.line, ftok.col, "Q or Q(i)", ftok.text)
            if st.peek() is not None and st.peek().kind == "(":
                st.take()
                itok = st.expect("word", "the letter i")
                if itok.text != "i":
                    raise ParseError(itok.line, itok.col, "the letter i", itok.text)
                st.expect(")", "')'")
                field = "Q(i)"
            else:
                field = "Q"
            st.done()
        elif key == "gens":
            if gens is not None:
                raise ParseError(head.line, head.col, "a single gens line")
            if field is None:
                raise ParseError(head.line, head.col, "the field line first")
            names = []
            while st.peek() is not None:
                tok = st.expect("word", "a generator name")
                if tok.text in RESERVED_NAMES:
                    raise ParseError(
                        tok.line,
                        tok.col,
                        "a name other than the reserved i, y1, y2",
                        tok.text,
                    )
                if tok.text in gen_index:
                    raise ParseError(tok.line, tok.col, "a fresh name", tok.text)
                gen_index[tok.text] = len(names)
                names.append(tok.text)
            if not names:
                st.fail("at least one generator name")
            gens = tuple(names)
        elif key == "rel":
            if gens is None:
                raise ParseError(head.line, head.col, "the gens line first")
            t = _expression(st, field, gen_index, 2, "a quadratic expression")
            st.done()
            relations.append(t)
        elif key in ("p12", "p11"):
            if field is None:
                raise ParseError(head.line, head.col, "the field line first")
            value = _scalar(st, field)
            st.done()
            if key == "p12":
                if p12 is not None:
                    raise ParseError(head.line, head.col, "a single p12 line")
                p12 = value
            else:
                if p11 is not None:
                    raise ParseError(head.line, head.col, "a single p11 line")
                p11 = value
        elif key == "sigma":
            if gens is None:
                raise ParseError(head.line, head.col, "the gens line first")
            gtok = st.expect("word", "a declared generator")
            if gtok.text not in gen_index:
                raise ParseError(
                    gtok.line, gtok.col, "a declared generator", gtok.text
                )
            g = gen_index[gtok.text]
            if g in sigma:
                raise ParseError(
                    gtok.line, gtok.col, "a single sigma line per generator"
                )
            st.expect("=", "'='")
            st.expect("[", "'[' opening the matrix")
            grid = []
            for s in range(2):
                st.expect("[", "'[' opening a matrix row")
                row = []
                for t in range(2):
                    row.append(
                        _expression(st, field, gen_index, 1, "a linear expression")
                    )
                    if t == 0:
                        st.expect(",", "',' between entries")
                grid.append(row)
                st.expect("]", "']' closing a matrix row")
                if s == 0:
                    st.expect(",", "',' between rows")
            st.expect("]", "']' closing the matrix")
            st.done()
            sigma[g] = grid
        elif key == "nu":
            if gens is None:
                raise ParseError(head.line, head.col, "the gens line first")
            gtok = st.expect("word", "a declared generator")
            if gtok.text not in gen_index:
                raise ParseError(
                    gtok.line, gtok.col, "a declared generator", gtok.text
                )
            g = gen_index[gtok.text]
            if g in nu:
                raise ParseError(
                    gtok.line, gtok.col, "a single nu line per generator"
                )
            st.expect("=", "'='")
            st.expect("[", "'[' opening the pair")
            col = []
            for s in range(2):
                col.append(
                    _expression(st, field, gen_index, 2, "a quadratic expression")
                )
                if s == 0:
                    st.expect(",", "',' between entries")
            st.expect("]", "']' closing the pair")
            st.done()
            nu[g] = col
        else:
            raise ParseError(
                head.line,
                head.col,
                "a directive (field, gens, rel, p12, p11, sigma, nu)",
                key,
            )
    eof = lineno + 1
    if field is None:
        raise ParseError(eof, 1, "a field line")
    if gens is None:
        raise ParseError(eof, 1, "a gens line")
    if p12 is None:
        raise ParseError(eof, 1, "a p12 line")
    if p11 is None:
        raise ParseError(eof, 1, "a p11 line")
    n = len(gens)
    for g in range(n):
        if g not in sigma:
            raise ParseError(eof, 1, "a sigma line for generator %s" % gens[g])
        if g not in nu:
            nu[g] = [Tensor.zero(n, 2), Tensor.zero(n, 2)]
    return ProblemSpec(field, gens, relations, p12, p11, sigma, nu)


# canonical emission ---------------------------------------------------------


def _coef_text(sc):
    text = format_scalar(sc)
    if "+" in text[1:] or "-" in text[1:]:
        return "(%s)" % text
    return text


def _expr_text(t, names):
    parts = []
    for word, coef in t.items():
        factors = [names[l] for l in word]
        if coef == ONE and factors:
            parts.append("*".join(factors))
        elif factors:
            parts.append("*".join([_coef_text(coef)] + factors))
        else:
            parts.append(_coef_text(coef))
    return " + ".join(parts) if parts else "0"


def emit_problem(spec):
    """Canonical text for a spec; reparsing yields an equal spec."""
    names = spec.gens
    lines = ["field %s" % spec.field, "gens %s" % " ".join(names)]
    for t in spec.relations:
        lines.append("rel %s" % _expr_text(t, names))
    lines.append("p12 %s" % format_scalar(spec.p12))
    lines.append("p11 %s" % format_scalar(spec.p11))
    for g, name in enumerate(names):
        grid = spec.sigma[g]
        lines.append(
            "sigma %s = [[%s, %s], [%s, %s]]"
            % (
                name,
                _expr_text(grid[0][0], names),
                _expr_text(grid[0][1], names),
                _expr_text(grid[1][0], names),
                _expr_text(grid[1][1], names),
            )
        )
    for g, name in enumerate(names):
        col = spec.nu[g]
        lines.append(
            "nu %s = [%s, %s]"
            % (name, _expr_text(col[0], names), _expr_text(col[1], names))
        )
    return "\n".join(lines) + "\n"


# serialization ---------------------------------------------------------------


def _names_for(t, gens):
    if t.nletters == len(gens):
        return gens
    if t.nletters == len(gens) + 2:
        return tuple(gens) + ("y1", "y2")
    return tuple("e%d" % l for l in range(t.nletters))


def tensor_to_json(t, gens):
    names = _names_for(t, gens)
    terms = []
    for word, coef in t.items():
        sc = Scalar._wrap(coef)
        terms.append(
            {
                "word": [names[l] for l in word],
                "re": str(sc.re),
                "im": str(sc.im),
            }
        )
    return {"degree": t.degree, "terms": terms}


def tensor_from_json(obj, gens, nletters=None):
    if nletters is None:
        nletters = len(gens)
    names = _names_for(Tensor.zero(nletters, 0), gens)
    index = {name: l for l, name in enumerate(names)}
    t = Tensor.zero(nletters, obj["degree"])
    for term in obj["terms"]:
        coef = Scalar.from_rationals(Fraction(term["re"]), Fraction(term["im"]))
        word = tuple(index[name] for name in term["word"])
        t = t + Tensor.word(nletters, word).scale(coef)
    return t


def _scalar_json(sc):
    return {"re": str(sc.re), "im": str(sc.im)}


def _lin_json(lin, gens):
    names = _names_for(Tensor.zero(lin.nletters, 0), gens)
    images = []
    for word in sorted(lin.images):
        images.append(
            {
                "on": [names[l] for l in word],
                "image": tensor_to_json(lin.images[word], gens),
            }
        )
    return {"degree_in": lin.deg_in, "degree_out": lin.deg_out, "images": images}


def _jsonable(obj, gens):
    if isinstance(obj, Tensor):
        return tensor_to_json(obj, gens)
    if isinstance(obj, Scalar):
        return _scalar_json(obj)
    if isinstance(obj, Lin):
        return _lin_json(obj, gens)
    if isinstance(obj, BlockMap):
        return {
            "rows": obj.rows,
            "cols": obj.cols,
            "entries": [
                [_lin_json(obj.entry(s, t), gens) for t in range(obj.cols)]
                for s in range(obj.rows)
            ],
        }
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v, gens) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v, gens) for v in obj]
    return obj


# text emitter ----------------------------------------------------------------


def _is_leaf(v):
    return v is None or isinstance(v, (Tensor, Scalar, Fraction, bool, int, str))


def _leaf_text(v, gens):
    if isinstance(v, Tensor):
        return _expr_text(v, _names_for(v, gens))
    if isinstance(v, Scalar):
        return format_scalar(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    return str(v)


def _scalar_matrix(v):
    return (
        isinstance(v, (list, tuple))
        and v
        and all(
            isinstance(row, (list, tuple))
            and row
            and all(isinstance(c, Scalar) for c in row)
            for row in v
        )
    )


def _text_lines(obj, gens, indent, out):
    pad = " " * indent
    if isinstance(obj, dict):
        for k, v in obj.items():
            label = str(k)
            if _is_leaf(v):
                out.append("%s%s: %s" % (pad, label, _leaf_text(v, gens)))
            elif _scalar_matrix(v):
                out.append("%s%s:" % (pad, label))
                for row in v:
                    out.append(
                        "%s  [%s]"
                        % (pad, ", ".join(format_scalar(c) for c in row))
                    )
            elif isinstance(v, (list, tuple)) and all(_is_leaf(x) for x in v):
                out.append(
                    "%s%s: [%s]"
                    % (pad, label, ", ".join(_leaf_text(x, gens) for x in v))
                )
            else:
                out.append("%s%s:" % (pad, label))
                _text_lines(v, gens, indent + 2, out)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            if _is_leaf(v):
                out.append("%s- %s" % (pad, _leaf_text(v, gens)))
            else:
                out.append("%s-" % pad)
                _text_lines(v, gens, indent + 2, out)
    elif isinstance(obj, Lin):
        names = _names_for(Tensor.zero(obj.nletters, 0), gens)
        if not obj.images:
            out.append("%s(zero map)" % pad)
        for word in sorted(obj.images):
            src = "*".join(names[l] for l in word) if word else "1"
            out.append(
                "%s%s -> %s"
                % (pad, src, _expr_text(obj.images[word], names))
            )
    elif isinstance(obj, BlockMap):
        for s in range(obj.rows):
            for t in range(obj.cols):
                out.append("%sentry (%d, %d):" % (pad, s + 1, t + 1))
                _text_lines(obj.entry(s, t), gens, indent + 2, out)
    else:
        out.append("%s%s" % (pad, _leaf_text(obj, gens)))


# latex emitter ---------------------------------------------------------------


def _latex_name(name):
    m = re.fullmatch(r"([A-Za-z]+)_?([0-9]+)", name)
    if m:
        return "%s_{%s}" % (m.group(1), m.group(2))
    return name


def _latex_frac(fr):
    if fr.denominator == 1:
        return str(fr.numerator)
    return "\\tfrac{%d}{%d}" % (fr.numerator, fr.denominator)


def _latex_scalar(sc):
    re_part, im_part = sc.re, sc.im
    if im_part == 0:
        return _latex_frac(re_part)
    if re_part == 0:
        if im_part == 1:
            return "i"
        if im_part == -1:
            return "-i"
        return "%s i" % _latex_frac(im_part)
    sign = "+" if im_part > 0 else "-"
    return "(%s %s %s i)" % (_latex_frac(re_part), sign, _latex_frac(abs(im_part)))


def _latex_tensor(t, names):
    pieces = []
    for word, coef in t.items():
        body = " \\otimes ".join(_latex_name(names[l]) for l in word)
        ctext = _latex_scalar(Scalar._wrap(coef))
        if ctext == "1" and body:
            text = body
        elif ctext == "-1" and body:
            text = "-" + body
        elif body:
            text = "%s\\, %s" % (ctext, body)
        else:
            text = ctext
        pieces.append(text)
    if not pieces:
        return "0"
    joined = pieces[0]
    for text in pieces[1:]:
        if text.startswith("-"):
            joined += " - " + text[1:]
        else:
            joined += " + " + text
    return joined


def _latex_superpotential(payload, gens):
    out = []
    for idx, key in ((1, "part1"), (2, "part2"), (3, "part3")):
        t = payload[key]
        if t.is_zero():
            continue
        names = _names_for(t, gens)
        out.append("\\[")
        out.append("\\hat{\\omega}_{%d} = %s" % (idx, _latex_tensor(t, names)))
        out.append("\\]")
    return "\n".join(out) + "\n"


def _latex_lines(obj, gens, out):
    if isinstance(obj, dict):
        for k, v in obj.items():
            label = str(k).replace("_", "\\_")
            if isinstance(v, Tensor):
                out.append(
                    "\\texttt{%s}: $%s$ \\\\"
                    % (label, _latex_tensor(v, _names_for(v, gens)))
                )
            elif isinstance(v, Scalar):
                out.append("\\texttt{%s}: $%s$ \\\\" % (label, _latex_scalar(v)))
            elif _scalar_matrix(v):
                rows = " \\\\ ".join(
                    " & ".join(_latex_scalar(c) for c in row) for row in v
                )
                out.append(
                    "\\texttt{%s}: $\\begin{pmatrix} %s \\end{pmatrix}$ \\\\"
                    % (label, rows)
                )
            elif _is_leaf(v):
                out.append(
                    "\\texttt{%s}: %s \\\\" % (label, _leaf_text(v, gens))
                )
            else:
                out.append("\\texttt{%s}: \\\\" % label)
                _latex_lines(v, gens, out)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _latex_lines(v, gens, out)
    else:
        text = []
        _text_lines(obj, gens, 0, text)
        out.extend(line + " \\\\" for line in text)


def emit_payload(payload, emit, gens):
    """Render a command payload as text, JSON, or LaTeX (deterministic)."""
    if emit == "json":
        return json.dumps(_jsonable(payload, gens), sort_keys=True, indent=2) + "\n"
    if emit == "latex":
        if payload.get("command") == "superpotential":
            return _latex_superpotential(payload, gens)
        out = []
        _latex_lines(payload, gens, out)
        return "\n".join(out) + "\n"
    out = []
    _text_lines(payload, gens, 0, out)
    return "\n".join(out) + "\n"


# commands --------------------------------------------------------------------


def _cert_payload(cert):
    return {
        "d": cert.d,
        "omega": cert.omega,
        "dims_w": list(cert.dims_w),
        "dims_a": list(cert.dims_a),
        "euler_ok": cert.euler_ok,
        "palindrome_ok": cert.palindrome_ok,
        "w_top_ok": cert.w_top_ok,
        "bound": cert.bound,
        "ok": cert.ok,
    }


def _family_payload(family):
    return [{"level": i, "map": family[i]} for i in sorted(family)]


def _nakayama_payload(rep):
    return {
        "muA": rep.L,
        "det_matrix": rep.U,
        "hdet": rep.H,
        "lift_right_top": list(rep.delta_r),
        "lift_left_top": list(rep.delta_l),
        "div": list(rep.div),
        "muB": rep.muB,
    }


def _built(spec, bound):
    A = spec.algebra()
    cert = as_certificate(A, bound)
    return A, cert


def _validated(spec, bound):
    A, cert = _built(spec, bound)
    if not cert.ok:
        raise NotRegularEvidence(
            "regularity certificate failed at bound %d: dims_w=%s euler_ok=%s "
            "palindrome_ok=%s w_top_ok=%s"
            % (bound, cert.dims_w, cert.euler_ok, cert.palindrome_ok, cert.w_top_ok)
        )
    ve = validate(A, spec.extension_input(), cert=cert)
    return A, cert, ve


def _require(ok, what):
    if not ok:
        raise InternalCheckError("guaranteed identity failed: %s" % what)


def run_command(spec, command, degree=None, trials=None):
    """Execute one command on a parsed spec.

    Returns (payload, exit_code); raises ValidationError or
    InternalCheckError for exit codes 1 and 3.
    """
    bound = max(6, degree or 0)
    if command == "analyze":
        A, cert = _built(spec, bound)
        payload = {"command": "analyze", "certificate": _cert_payload(cert)}
        return payload, (0 if cert.ok else 1)
    if command == "validate":
        A, cert, ve = _validated(spec, bound)
        payload = {
            "command": "validate",
            "flags": dict(ve.flags),
            "notes": list(ve.notes),
            "p12": ve.p12,
            "p11": ve.p11,
        }
        return payload, 0
    if command == "quadruple":
        A, cert, ve = _validated(spec, bound)
        quad = build_quadruple(ve)
        payload = {
            "command": "quadruple",
            "top_degree": quad.d,
            "lift_right": _family_payload(quad.delta_r),
            "lift_left": _family_payload(quad.delta_l),
            "pairing_right": _family_payload(quad.upsilon_r),
            "pairing_left": _family_payload(quad.upsilon_l),
            "row_right": _family_payload(quad.gamma_r),
            "row_left": _family_payload(quad.gamma_l),
        }
        return payload, 0
    if command == "nakayama":
        A, cert, ve = _validated(spec, bound)
        quad = build_quadruple(ve)
        rep = nakayama_report(ve, quad)
        payload = {"command": "nakayama"}
        payload.update(_nakayama_payload(rep))
        return payload, 0
    if command == "resolution":
        D = degree if degree is not None else 6
        A, cert, ve = _validated(spec, max(bound, D))
        quad = build_quadruple(ve)
        F = assemble_F(A, ve, quad, D)
        rep = verify_resolution(F, D)
        payload = {
            "command": "resolution",
            "ok": rep["ok"],
            "degree_bound": rep["degree_bound"],
            "rank_pattern": {str(m): list(v) for m, v in rep["rank_pattern"].items()},
            "ranks": rep["ranks"],
            "homotopy": chain_identity_report(F),
        }
        return payload, 0
    if command == "superpotential":
        A, cert, ve = _validated(spec, bound)
        quad = build_quadruple(ve)
        sp = build_omega_hat(A, ve, quad, cert.omega)
        payload = {
            "command": "superpotential",
            "top_degree": sp.d + 2,
            "part1": sp.part1,
            "part2": sp.part2,
            "part3": sp.part3,
            "omega_hat": sp.omega_hat,
        }
        return payload, 0
    if command == "verify":
        D = degree if degree is not None else 6
        bound = max(6, D)
        A, cert, ve = _validated(spec, bound)
        B, hilbert = build_B(ve, bound)
        quad = build_quadruple(ve)
        rep = nakayama_report(ve, quad)
        sp = build_omega_hat(A, ve, quad, cert.omega)
        twist = verify_twisted(sp, rep.muB)
        _require(twist["ok"], "twisted cyclic symmetry of the superpotential")
        dq = derivation_quotient_check(sp, A, ve)
        _require(dq["ok"], "derivation quotient recovers the relations")
        F = assemble_F(A, ve, quad, D)
        res = verify_resolution(F, D)
        homotopy = chain_identity_report(F)
        for name, ok in homotopy.items():
            _require(ok, "chain identity %s" % name)
        power = power_identity_report(ve)
        quad_top = build_quadruple(ve, through_d=True)
        sums = sum_identity_report(ve, quad_top)
        rows = row_relation_report(ve, quad_top)
        for report in (power, sums, rows):
            for name, ok in report.items():
                _require(ok, "calculus identity %s" % name)
        count = trials or 0
        for t in range(count):
            rng = random.Random(1009 + t)
            ve2 = validate(A, perturb_extension(ve, rng), cert=cert)
            quad2 = build_quadruple(ve2, rng=rng)
            rep2 = nakayama_report(ve2, quad2)
            same = all(
                (rep.div[s] - rep2.div[s]).is_zero() for s in range(2)
            )
            _require(same, "divergence invariance across quadruple choices")
        payload = {
            "command": "verify",
            "certificate": _cert_payload(cert),
            "extension_flags": dict(ve.flags),
            "hilbert": hilbert,
            "nakayama": _nakayama_payload(rep),
            "twist_ok": True,
            "derivation_quotient": dq,
            "resolution": {
                "ok": res["ok"],
                "degree_bound": res["degree_bound"],
                "rank_pattern": {
                    str(m): list(v) for m, v in res["rank_pattern"].items()
                },
                "ranks": res["ranks"],
            },
            "homotopy": homotopy,
            "identities": {"powers": power, "sums": sums, "rows": rows},
            "divergence_trials": {"count": count, "all_equal": True},
        }
        return payload, 0
    raise ValueError("unknown command %r" % command)


def _error_payload(kind, exc):
    return {
        "error": {
            "kind": kind,
            "condition": getattr(exc, "condition", kind),
            "message": str(exc),
            "witness": getattr(exc, "witness", None),
        }
    }


def _write_out(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dorex",
        description="Double Ore extension calculus over exact rationals.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", help="problem file")
    parser.add_argument(
        "--emit", choices=("text", "json", "latex"), default="text"
    )
    parser.add_argument("--degree", type=int, default=None)
    parser.add_argument(
        "--randomized-quadruples", type=int, default=None, dest="trials"
    )
    parser.add_argument("--out", default=None)
    args = parser.parse_args(argv)
    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print("cannot read %s: %s" % (args.input, exc), file=sys.stderr)
        return 2
    gens = ()
    try:
        spec = parse_input(text)
        gens = spec.gens
        payload, code = run_command(
            spec, args.command, degree=args.degree, trials=args.trials
        )
    except ParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return 2
    except ValidationError as exc:
        _write_out(
            emit_payload(_error_payload("validation", exc), args.emit, gens),
            None,
        )
        return 1
    except InternalCheckError as exc:
        _write_out(
            emit_payload(_error_payload("internal", exc), args.emit, gens),
            None,
        )
        return 3
    _write_out(emit_payload(payload, args.emit, gens), args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
