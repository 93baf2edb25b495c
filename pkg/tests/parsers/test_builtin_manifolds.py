import pytest

from sktpol.parsers.builtin_manifolds import (
    ALIASES,
    builtin_names,
    builtin_text,
    load_builtin,
    resolve_manifold,
)
from sktpol.parsers.manifold_parser import parse_form
from sktpol.utils.errors import UnknownManifoldError


def test_registry_names():
    assert builtin_names() == ["iwasawa", "s3xs3-calabi-eckmann", "torus3"]
    for alias, name in ALIASES.items():
        assert builtin_text(alias) == builtin_text(name)


def test_builtins_parse_and_validate():
    torus = load_builtin("torus3")
    assert torus.presentation.n == 3
    assert all(not form for form in torus.presentation.dtable)
    assert torus.metric_declared
    assert torus.volume.form == parse_form("(123|)", 3)

    iwasawa = load_builtin("iwasawa")
    assert iwasawa.presentation.dtable[2] == parse_form("-(12|)", 3)

    s3xs3 = load_builtin("s3xs3")
    assert s3xs3.name == "s3xs3-calabi-eckmann"
    assert s3xs3.volume is None
    assert s3xs3.real_names == ["e1", "e2", "e3", "f1", "f2", "f3"]


def test_unknown_names_are_rejected():
    with pytest.raises(UnknownManifoldError):
        builtin_text("k3")
    with pytest.raises(UnknownManifoldError):
        resolve_manifold("no-such-manifold")


def test_resolve_reads_files_and_stdin(tmp_path):
    path = tmp_path / "heisenberg.sktpol"
    path.write_text("name heisenberg\nn 2\nd p1 = 0\nd p2 = (1|1)\n", encoding="utf-8")
    from_file = resolve_manifold(str(path))
    assert from_file.name == "heisenberg"
    assert from_file.presentation.dtable[1] == parse_form("(1|1)", 2)

    from_stdin = resolve_manifold("-", path.read_text(encoding="utf-8"))
    assert from_stdin.same_as(from_file)

    assert resolve_manifold("torus").same_as(load_builtin("torus3"))
