"""
sktpol - Builtin Manifolds
Example presentations shipped as structure-file text and parsed like user files
"""

import logging
from pathlib import Path
from typing import Dict, List

from sktpol.parsers.manifold_parser import ParsedManifold, parse_manifold
from sktpol.utils.errors import UnknownManifoldError

logger = logging.getLogger(__name__)

TORUS3 = """\
# Abelian complex torus of dimension 3
name torus3
n 3
d p1 = 0
d p2 = 0
d p3 = 0
metric 1 1 = 1/2
metric 2 2 = 1/2
metric 3 3 = 1/2
volume = (123|)
"""

IWASAWA = """\
# Holomorphically parallelisable Heisenberg quotient
name iwasawa
n 3
d p1 = 0
d p2 = 0
d p3 = -(12|)
metric 1 1 = 1/2
metric 2 2 = 1/2
metric 3 3 = 1/2
volume = (123|)
"""

S3XS3_CALABI_ECKMANN = """\
# Two copies of su(2) with the Calabi-Eckmann complex structure
name s3xs3-calabi-eckmann
real e1 e2 e3 f1 f2 f3
d e1 = -2*e2^e3
d e2 = 2*e1^e3
d e3 = -2*e1^e2
d f1 = -2*f2^f3
d f2 = 2*f1^f3
d f3 = -2*f1^f2
J e1 = e2
J f1 = f2
J e3 = f3
metric 1 1 = 1/2
metric 2 2 = 1/2
metric 3 3 = 1/2
"""

BUILTINS: Dict[str, str] = {
    "torus3": TORUS3,
    "iwasawa": IWASAWA,
    "s3xs3-calabi-eckmann": S3XS3_CALABI_ECKMANN,
}

ALIASES: Dict[str, str] = {
    "torus": "torus3",
    "s3xs3": "s3xs3-calabi-eckmann",
}


def builtin_names() -> List[str]:
    return sorted(BUILTINS)


def builtin_text(name: str) -> str:
    key = ALIASES.get(name, name)
    if key not in BUILTINS:
        raise UnknownManifoldError(f"No builtin manifold named {name!r}; known: {', '.join(builtin_names())}")
    return BUILTINS[key]


def load_builtin(name: str, validate: bool = True) -> ParsedManifold:
    return parse_manifold(builtin_text(name), validate)


def resolve_manifold(source: str, stdin_text: str = "", validate: bool = True) -> ParsedManifold:
    """A builtin name, a path to a structure file, or '-' for the given stdin text"""
    if source == "-":
        logger.debug("Reading structure file from stdin")
        return parse_manifold(stdin_text, validate)
    if ALIASES.get(source, source) in BUILTINS:
        return load_builtin(source, validate)
    path = Path(source)
    if not path.is_file():
        raise UnknownManifoldError(f"{source!r} is neither a builtin manifold nor a readable file")
    logger.info(f"Loading structure file {path}")
    return parse_manifold(path.read_text(encoding="utf-8"), validate)
