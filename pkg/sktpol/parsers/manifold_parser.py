"""
sktpol - Manifold Parser
Line-oriented structure-equation files: complex or real-basis presentation, metric and volume
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sktpol.models.coframe import CoframeChange, CoframePresentation, Form, VectorForm
from sktpol.models.exact import (
    IMAG,
    ONE,
    ZERO,
    Scalar,
    conj,
    format_scalar,
    parse_scalar,
    sparse_matrix,
)
from sktpol.models.metric import HermitianMetric
from sktpol.models.polarisation import HolomorphicVolume
from sktpol.utils.errors import ManifoldFileError, SktpolError

logger = logging.getLogger(__name__)

GRAMMAR = """
file      := line*
line      := comment | statement
comment   := '#' text                         (also allowed after a statement)
statement := 'name' word
           | 'n' int
           | 'coframe' word{n}                complex generator names, default p1..pn
           | 'd' word '=' expr                structure equation
           | 'real' word{2n}                  switches 'd' lines to the real basis
           | 'J' word '=' word                x + i*y becomes the next complex generator
           | 'metric' int int '=' scalar      h_{j conj(k)}, Hermitian completion
           | 'volume' '=' expr                holomorphic (n,0)-form
expr      := '0' | term (('+'|'-') term)*
term      := coeff? '*'? '(' digits '|' digits ')'        complex block
           | coeff? '*'? word ('^' word)*                 real block
coeff     := '(' scalar ')' | digits ('/' digits)? 'i'? | 'i'
scalar    := a/b+c/di notation, e.g. 1/2, -3i, 1/2-1/2i
vector    := term 'Z' digit, e.g. (|1)Z1 - 1/2i*(|2)Z3
"""

_COEFF = r"(?:\((?P<paren>[^()|]*)\)|(?P<simple>\d+(?:/\d+)?i?|i))?"
_SIGN = r"\s*(?P<sign>[+-])?\s*"


@dataclass
class ParsedManifold:
    """
    PARSED MANIFOLD
    - presentation: validated structure equations in the complex coframe
    - metric: the declared Hermitian metric, or the standard one when none is declared
    - volume: the declared holomorphic volume, if any
    """

    presentation: CoframePresentation
    metric: HermitianMetric
    volume: Optional[HolomorphicVolume] = None
    metric_declared: bool = True
    real_names: List[str] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.presentation.name

    def same_as(self, other: "ParsedManifold") -> bool:
        """Equality of the mathematical content; names and comments are ignored"""
        if not self.presentation.same_table(other.presentation):
            return False
        if dict(self.metric.matrix) != dict(other.metric.matrix):
            return False
        mine = self.volume.form if self.volume else None
        theirs = other.volume.form if other.volume else None
        return mine == theirs


class ManifoldParser:
    """
    STRUCTURE FILE PARSER
    - one statement per line, '#' starts a comment
    - every syntax error carries its line and column
    - real-basis blocks are converted through the declared J pairs
    """

    def __init__(self, text: str, validate: bool = True):
        self.text = text
        self.validate = validate
        self.patterns = self._compile_line_patterns()
        self.name = ""
        self.n: Optional[int] = None
        self.coframe: Optional[List[str]] = None
        self.real: Optional[List[str]] = None
        self.pairs: List[Tuple[str, str, int]] = []
        self.equations: Dict[str, Tuple[str, int, int]] = {}
        self.metric: Dict[Tuple[int, int], Tuple[Scalar, int]] = {}
        self.volume: Optional[Tuple[str, int, int]] = None

    def _compile_line_patterns(self) -> Dict[str, re.Pattern]:
        return {
            "name": re.compile(r"name\s+(?P<value>\S.*?)\s*$"),
            "n": re.compile(r"n\s+(?P<value>\d+)\s*$"),
            "coframe": re.compile(r"coframe\s+(?P<value>.+?)\s*$"),
            "real": re.compile(r"real\s+(?P<value>.+?)\s*$"),
            "d": re.compile(r"d\s+(?P<target>[A-Za-z_]\w*)\s*=\s*(?P<expr>.*?)\s*$"),
            "J": re.compile(r"J\s+(?P<source>[A-Za-z_]\w*)\s*=\s*(?P<image>[A-Za-z_]\w*)\s*$"),
            "metric": re.compile(r"metric\s+(?P<j>\d+)\s+(?P<k>\d+)\s*=\s*(?P<value>.+?)\s*$"),
            "volume": re.compile(r"volume\s*=\s*(?P<expr>.*?)\s*$"),
        }

    # -- statements -------------------------------------------------------

    def parse(self) -> ParsedManifold:
        for number, raw in enumerate(self.text.splitlines(), start=1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            indent = len(line) - len(line.lstrip())
            self._statement(line.strip(), number, indent + 1)
        return self._build()

    def _statement(self, line: str, number: int, column: int) -> None:
        keyword = line.split(None, 1)[0].split("=", 1)[0]
        pattern = self.patterns.get(keyword)
        match = pattern.match(line) if pattern else None
        if match is None:
            raise ManifoldFileError(f"Unrecognised statement: {line}", number, column)

        if keyword == "name":
            self.name = match.group("value")
        elif keyword == "n":
            self.n = int(match.group("value"))
            if self.n < 1 or self.n > 9:
                raise ManifoldFileError("n must be between 1 and 9", number, column + match.start("value"))
        elif keyword in ("coframe", "real"):
            names = match.group("value").split()
            for word in names:
                if not re.fullmatch(r"[A-Za-z_]\w*", word) or word == "i":
                    raise ManifoldFileError(f"Invalid generator name {word!r}", number, column)
            if len(set(names)) != len(names):
                raise ManifoldFileError(f"Repeated generator name in {keyword}", number, column)
            setattr(self, keyword, names)
        elif keyword == "d":
            target = match.group("target")
            if target in self.equations:
                raise ManifoldFileError(f"Second equation for d {target}", number, column)
            self.equations[target] = (match.group("expr"), number, column + match.start("expr"))
        elif keyword == "J":
            self.pairs.append((match.group("source"), match.group("image"), number))
        elif keyword == "metric":
            j, k = int(match.group("j")), int(match.group("k"))
            try:
                value = parse_scalar(match.group("value"))
            except SktpolError as e:
                raise ManifoldFileError(str(e), number, column + match.start("value")) from e
            if (j, k) in self.metric:
                raise ManifoldFileError(f"Second metric entry for ({j},{k})", number, column)
            self.metric[(j, k)] = (value, number)
        elif keyword == "volume":
            if self.volume is not None:
                raise ManifoldFileError("Second volume statement", number, column)
            self.volume = (match.group("expr"), number, column + match.start("expr"))

    # -- assembly ---------------------------------------------------------

    def _dimension(self) -> int:
        if self.real is not None:
            if len(self.real) % 2:
                raise ManifoldFileError("A real basis needs an even number of generators", 0, 0)
            n = len(self.real) // 2
            if self.n is not None and self.n != n:
                raise ManifoldFileError(f"n {self.n} disagrees with {len(self.real)} real generators", 0, 0)
            return n
        if self.n is not None:
            return self.n
        if self.coframe is not None:
            return len(self.coframe)
        raise ManifoldFileError("Missing 'n' statement", 0, 0)

    def _build(self) -> ParsedManifold:
        n = self._dimension()
        names = self.coframe or [f"p{i + 1}" for i in range(n)]
        if len(names) != n:
            raise ManifoldFileError(f"coframe declares {len(names)} names for n={n}", 0, 0)

        if self.real is not None:
            dtable = self._real_block(n)
        else:
            if self.pairs:
                line = self.pairs[0][2]
                raise ManifoldFileError("J statements need a 'real' block", line, 1)
            dtable = []
            for target in self.equations:
                if target not in names:
                    _, line, _ = self.equations[target]
                    raise ManifoldFileError(f"Unknown generator {target!r}", line, 3)
            for name in names:
                if name in self.equations:
                    text, line, column = self.equations[name]
                    dtable.append(parse_form(text, n, line, column))
                else:
                    dtable.append(Form.zero(n))

        presentation = CoframePresentation(n, dtable, names, self.name)
        if self.validate:
            presentation.require_valid()

        declared = bool(self.metric)
        metric = HermitianMetric(presentation, self._metric_matrix(n)) if declared else HermitianMetric.standard(presentation)
        if not declared:
            logger.info(f"No metric declared for {self.name or 'manifold'}, using the standard one")

        volume = None
        if self.volume is not None:
            text, line, column = self.volume
            volume = HolomorphicVolume.check(presentation, parse_form(text, n, line, column))
        return ParsedManifold(presentation, metric, volume, declared, list(self.real or []))

    def _metric_matrix(self, n: int):
        rows: Dict[int, Dict[int, Scalar]] = {}
        for (j, k), (value, line) in self.metric.items():
            if not (1 <= j <= n and 1 <= k <= n):
                raise ManifoldFileError(f"Metric index ({j},{k}) out of range for n={n}", line, 1)
            mirror = self.metric.get((k, j))
            if mirror is not None and mirror[0] != conj(value):
                raise ManifoldFileError(f"Metric entries ({j},{k}) and ({k},{j}) are not conjugate", line, 1)
            rows.setdefault(j - 1, {})[k - 1] = value
            if j != k:
                rows.setdefault(k - 1, {})[j - 1] = conj(value)
        return sparse_matrix(rows, n, n)

    def _real_block(self, n: int) -> List[Form]:
        real = self.real
        index = {name: g for g, name in enumerate(real)}
        if len(self.pairs) != n:
            raise ManifoldFileError(f"Expected {n} J statements, got {len(self.pairs)}", 0, 0)
        used = set()
        rows: Dict[int, Dict[int, Scalar]] = {}
        for k, (source, image, line) in enumerate(self.pairs):
            for word in (source, image):
                if word not in index:
                    raise ManifoldFileError(f"Unknown real generator {word!r}", line, 1)
                if word in used:
                    raise ManifoldFileError(f"Real generator {word!r} paired twice", line, 1)
                used.add(word)
            # phi^k = x + i y for J x = y on vectors
            rows[k] = {index[source]: ONE, index[image]: IMAG}
            rows[n + k] = {index[source]: ONE, index[image]: -IMAG}

        differentials = []
        for target in self.equations:
            if target not in index:
                _, line, _ = self.equations[target]
                raise ManifoldFileError(f"Unknown real generator {target!r}", line, 3)
        for name in real:
            if name in self.equations:
                text, line, column = self.equations[name]
                differentials.append(parse_real_form(text, n, index, line, column))
            else:
                differentials.append(Form.zero(n))

        change = CoframeChange(n, sparse_matrix(rows, 2 * n, 2 * n))
        complex_differentials = change.transform_differentials(differentials)
        logger.debug(f"Converted {2 * n} real generators to complex coframe")
        return complex_differentials[:n]


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


_COMPLEX_TERM = re.compile(_SIGN + _COEFF + r"\s*\*?\s*\((?P<holo>\d*)\|(?P<anti>\d*)\)(?:Z(?P<vector>\d))?\s*")
_REAL_TERM = re.compile(_SIGN + _COEFF + r"\s*\*?\s*(?P<word>[A-Za-z_]\w*(?:\s*\^\s*[A-Za-z_]\w*)*)\s*")


def _coefficient(match: re.Match, line: int, column: int) -> Scalar:
    text = match.group("paren") if match.group("paren") is not None else match.group("simple")
    try:
        value = parse_scalar(text) if text else ONE
    except SktpolError as e:
        raise ManifoldFileError(str(e), line, column + match.start()) from e
    return -value if match.group("sign") == "-" else value


def _terms(text: str, pattern: re.Pattern, line: int, column: int):
    """Yield (match, coefficient) for every term, enforcing signs between terms"""
    if text.strip() == "0":
        return
    if not text.strip():
        raise ManifoldFileError("Empty expression", line, column)
    position = 0
    while position < len(text):
        match = pattern.match(text, position)
        if match is None or match.end() == position:
            raise ManifoldFileError(f"Unparsable term near {text[position:]!r}", line, column + position)
        if position > 0 and not match.group("sign"):
            raise ManifoldFileError("Terms must be joined by + or -", line, column + position)
        yield match, _coefficient(match, line, column)
        position = match.end()


def _digits(text: str, n: int, line: int, column: int) -> List[int]:
    indices = [int(ch) for ch in text]
    if any(i < 1 or i > n for i in indices):
        raise ManifoldFileError(f"Index out of range for n={n} in {text!r}", line, column)
    if len(set(indices)) != len(indices):
        raise ManifoldFileError(f"Repeated index in {text!r}", line, column)
    return indices


def parse_form(text: str, n: int, line: int = 1, column: int = 1) -> Form:
    """Parse a complex-block expression such as '(1/2)*(1|13) + 1/2i*(2|23)'"""
    total = Form.zero(n)
    for match, coeff in _terms(text, _COMPLEX_TERM, line, column):
        if match.group("vector"):
            raise ManifoldFileError("Unexpected frame vector in a form", line, column + match.start("vector"))
        holo = _digits(match.group("holo"), n, line, column + match.start("holo"))
        anti = _digits(match.group("anti"), n, line, column + match.start("anti"))
        total = total + Form.monomial(n, holo, anti, coeff)
    return total


def parse_vector_form(text: str, n: int, line: int = 1, column: int = 1) -> VectorForm:
    """Parse a T^{1,0}-valued (0,q)-form such as '(|1)Z1 - 1/2i*(|2)Z3'"""
    components = [Form.zero(n) for _ in range(n)]
    q = None
    for match, coeff in _terms(text, _COMPLEX_TERM, line, column):
        if not match.group("vector"):
            raise ManifoldFileError("Missing frame vector Zi", line, column + match.end())
        if match.group("holo"):
            raise ManifoldFileError("Vector-valued forms have type (0,q)", line, column + match.start("holo"))
        i = _digits(match.group("vector"), n, line, column + match.start("vector"))[0]
        anti = _digits(match.group("anti"), n, line, column + match.start("anti"))
        if q is not None and len(anti) != q:
            raise ManifoldFileError("Mixed form degrees in a vector-valued form", line, column + match.start())
        q = len(anti)
        components[i - 1] = components[i - 1] + Form.monomial(n, (), anti, coeff)
    return VectorForm(n, q or 0, components)


def parse_real_form(text: str, n: int, index: Dict[str, int], line: int = 1, column: int = 1) -> Form:
    """
    Parse a real-block expression such as '-2*e2^e3' into a Form whose
    generator g stands for the g-th real generator
    """
    total = Form.zero(n)
    for match, coeff in _terms(text, _REAL_TERM, line, column):
        words = [w.strip() for w in match.group("word").split("^")]
        unknown = [w for w in words if w not in index]
        if unknown:
            raise ManifoldFileError(f"Unknown real generator {unknown[0]!r}", line, column + match.start("word"))
        term = Form.one(n).scale(coeff)
        for w in words:
            term = term.wedge(Form.generator(n, index[w]))
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def parse_manifold(text: str, validate: bool = True) -> ParsedManifold:
    parsed = ManifoldParser(text, validate).parse()
    logger.debug(f"Parsed {parsed.name or 'manifold'} with n={parsed.presentation.n}")
    return parsed


def print_manifold(parsed: ParsedManifold) -> str:
    """Canonical complex-block text; parse_manifold(print_manifold(m)) has the same content as m"""
    P = parsed.presentation
    lines = []
    if P.name:
        lines.append(f"name {P.name}")
    lines.append(f"n {P.n}")
    lines.append("coframe " + " ".join(P.names))
    for name, form in zip(P.names, P.dtable):
        lines.append(f"d {name} = {form.to_string()}")
    for j in range(P.n):
        for k in range(j, P.n):
            value = parsed.metric.entry(j, k)
            if value != ZERO:
                lines.append(f"metric {j + 1} {k + 1} = {format_scalar(value)}")
    if parsed.volume is not None:
        lines.append(f"volume = {parsed.volume.form.to_string()}")
    return "\n".join(lines) + "\n"
