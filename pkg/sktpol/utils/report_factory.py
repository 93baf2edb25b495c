"""
sktpol - Report Factory
Centralized report creation with a stable JSON schema and a short human summary
"""

import json
from typing import Any, Dict, Iterable, List, Optional, Sequence

from sktpol.models.checks import CheckLog
from sktpol.models.coframe import Form, VectorForm
from sktpol.models.exact import Scalar, format_scalar

SCHEMA = "sktpol.report/1"


class ReportFactory:
    """
    Centralized report factory for every command
    - deterministic: no timestamps, keys sorted on output
    - exact values are rendered as "a/b+c/di" strings
    """

    STATUS_SYMBOLS = {
        'ok': '✅',
        'failed': '⚠️',
        'error': '❌',
    }

    @classmethod
    def create_report(
        cls,
        command: str,
        inputs: Dict[str, Any],
        results: Dict[str, Any],
        checks: Optional[CheckLog] = None,
    ) -> Dict[str, Any]:
        check_list = checks.to_list() if checks is not None else []
        status = "ok" if all(c["passed"] for c in check_list) else "failed"
        return {
            "schema": SCHEMA,
            "command": command,
            "inputs": cls.jsonable(inputs),
            "results": cls.jsonable(results),
            "checks": check_list,
            "status": status,
        }

    @classmethod
    def create_error_report(cls, command: str, inputs: Dict[str, Any], error: Exception) -> Dict[str, Any]:
        checks = CheckLog()
        checks.record(type(error).__name__, False, str(error))
        report = cls.create_report(command, inputs, {}, checks)
        report["status"] = "error"
        report["error"] = {"type": type(error).__name__, "message": str(error)}
        for attribute in ("line", "column", "check", "generator"):
            if hasattr(error, attribute):
                report["error"][attribute] = getattr(error, attribute)
        if getattr(error, "residual", None) is not None:
            report["error"]["residual"] = cls.jsonable(error.residual)
        if getattr(error, "defect", None):
            report["error"]["defect"] = [cls.form(f) for f in error.defect]
        return report

    # -- values -----------------------------------------------------------

    @classmethod
    def jsonable(cls, value: Any) -> Any:
        """Recursively convert model values into JSON-ready structures"""
        if isinstance(value, Scalar):
            return format_scalar(value)
        if isinstance(value, (Form, VectorForm)):
            return cls.form(value)
        if isinstance(value, CheckLog):
            return value.to_list()
        if isinstance(value, dict):
            return {str(k): cls.jsonable(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [cls.jsonable(v) for v in value]
        return value

    @staticmethod
    def form(value) -> Dict[str, Any]:
        return {"text": value.to_string(), "terms": value.to_list()}

    @classmethod
    def basis(cls, forms: Iterable) -> List[Dict[str, Any]]:
        return [cls.form(f) for f in forms]

    @staticmethod
    def sparse(coordinates: Optional[Dict[int, Scalar]]) -> Optional[Dict[str, str]]:
        if coordinates is None:
            return None
        return {str(k): format_scalar(v) for k, v in sorted(coordinates.items())}

    @staticmethod
    def matrix(rows: Sequence[Sequence[Scalar]]) -> List[List[str]]:
        return [[format_scalar(x) for x in row] for row in rows]

    @staticmethod
    def bidegree(bidegree) -> str:
        if isinstance(bidegree, tuple):
            return f"{bidegree[0]},{bidegree[1]}"
        return str(bidegree)

    # -- output -----------------------------------------------------------

    @staticmethod
    def render(report: Dict[str, Any], indent: int = 2) -> str:
        return json.dumps(report, sort_keys=True, indent=indent or None, ensure_ascii=False)

    @classmethod
    def summary(cls, report: Dict[str, Any]) -> str:
        symbol = cls.STATUS_SYMBOLS.get(report["status"], "")
        lines = [f"{symbol} {report['command']}: {report['status']}"]
        if "error" in report:
            lines.append(f"   {report['error']['type']}: {report['error']['message']}")
        for check in report["checks"]:
            if not check["passed"] and "error" not in report:
                lines.append(f"   failed {check['name']}: {check['detail']}")
        return "\n".join(lines)
