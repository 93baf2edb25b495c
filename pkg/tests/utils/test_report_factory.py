import json

from sktpol.models.checks import CheckLog
from sktpol.models.exact import rational, scalar
from sktpol.parsers.manifold_parser import parse_form
from sktpol.utils.errors import IntegrabilityError, ManifoldFileError
from sktpol.utils.report_factory import SCHEMA, ReportFactory


def test_values_are_rendered_exactly():
    results = {
        "value": scalar(rational(1, 2), -1),
        "form": parse_form("-1/2i*(12|12)", 3),
        "nested": [{(1, 2): scalar(0)}],
    }
    report = ReportFactory.create_report("skt", {"manifold": "iwasawa"}, results)
    assert report["schema"] == SCHEMA
    assert report["status"] == "ok"
    assert report["results"]["value"] == "1/2-1i"
    assert report["results"]["form"]["text"] == "-1/2i*(12|12)"
    assert report["results"]["form"]["terms"] == [{"monomial": "(12|12)", "coeff": "-1/2i"}]
    assert report["results"]["nested"] == [{"(1, 2)": "0"}]


def test_failed_checks_set_the_status():
    checks = CheckLog()
    checks.record("skt", False, "partial dbar omega != 0")
    report = ReportFactory.create_report("skt", {}, {}, checks)
    assert report["status"] == "failed"
    assert "failed skt" in ReportFactory.summary(report)


def test_error_reports_carry_the_payload():
    report = ReportFactory.create_error_report("show", {}, ManifoldFileError("bad term", 2, 11))
    assert report["status"] == "error"
    assert report["error"] == {
        "type": "ManifoldFileError",
        "message": "line 2, column 11: bad term",
        "line": 2,
        "column": 11,
    }
    assert report["checks"][0]["passed"] is False

    defect = [parse_form("0", 2), parse_form("(|12)", 2)]
    report = ReportFactory.create_error_report("deform", {}, IntegrabilityError("not integrable", defect))
    assert [d["text"] for d in report["error"]["defect"]] == ["0", "(|12)"]


def test_rendering_is_sorted_and_stable():
    report = ReportFactory.create_report("show", {"b": 1, "a": 2}, {})
    text = ReportFactory.render(report, 0)
    assert "\n" not in text
    assert text == ReportFactory.render(json.loads(text), 0)
    assert text.index('"checks"') < text.index('"command"')
