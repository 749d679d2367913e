# -*- coding: utf-8 -*-
"""
报告导出模块
把各项分析的结果整理为 Report，并导出为字节确定的 JSON 或人类可读文本
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from folhol import TOOL_NAME, __version__
from folhol.exactalg.poly import PolyVector, Rational, format_poly, format_vector, to_fraction
from folhol.log import get_logger

logger = get_logger('report')


@dataclass
class AnalysisResult:
    analysis: str
    params: Dict[str, Any]
    outcome: str = 'ok'
    data: Dict[str, Any] = field(default_factory=dict)

    @property
    def failed(self):
        return self.outcome != 'ok'


@dataclass
class Report:
    input: Dict[str, Any]
    tolerances: Dict[str, Any]
    results: List[AnalysisResult] = field(default_factory=list)
    tool: str = TOOL_NAME
    version: str = __version__

    def add(self, result: AnalysisResult):
        self.results.append(result)
        return result

    @property
    def exit_code(self):
        return 1 if any(r.failed for r in self.results) else 0


def encode(value):
    """
    转换为 JSON 可表示的值：有理数 -> {"num", "den"}，浮点数 -> 17 位有效数字字符串
    """
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (Fraction, Rational)):
        frac = to_fraction(value)
        return {"num": frac.numerator, "den": frac.denominator}
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g')
    if isinstance(value, np.ndarray):
        return [encode(v) for v in value.tolist()]
    if isinstance(value, PolyVector):
        return format_vector(value)
    if hasattr(value, 'ring') and hasattr(value, 'items'):
        return format_poly(value)
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    raise TypeError(f"无法序列化的报告值: {type(value).__name__}")


def to_dict(report: Report):
    return {
        "tool": report.tool,
        "version": report.version,
        "input": encode(report.input),
        "results": [
            {
                "analysis": r.analysis,
                "params": encode(r.params),
                "outcome": r.outcome,
                "data": encode(r.data),
            }
            for r in report.results
        ],
        "tolerances": encode(report.tolerances),
    }


def to_json(report: Report) -> str:
    """字节确定的 JSON 文本（键排序，不含时间戳）"""
    return json.dumps(to_dict(report), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def _render(value):
    if isinstance(value, dict) and set(value) == {"num", "den"}:
        return str(value["num"]) if value["den"] == 1 else f"{value['num']}/{value['den']}"
    if isinstance(value, (dict, list)):
        return json.dumps(value, ensure_ascii=False, sort_keys=True)
    return str(value)


def format_report(report: Report) -> str:
    payload = to_dict(report)
    lines = [f"{payload['tool']} {payload['version']}"]
    for key in sorted(payload["input"]):
        lines.append(f"{key}: {_render(payload['input'][key])}")
    for result in payload["results"]:
        lines.append("")
        params = ", ".join(f"{k}={_render(v)}" for k, v in sorted(result["params"].items()))
        lines.append(f"[{result['analysis']}] {result['outcome']}" + (f" ({params})" if params else ""))
        for key in sorted(result["data"]):
            lines.append(f"  {key}: {_render(result['data'][key])}")
    lines.append("")
    lines.append("tolerances: " + ", ".join(f"{k}={_render(v)}" for k, v in sorted(payload["tolerances"].items())))
    return "\n".join(lines) + "\n"


def save_report(report: Report, output_path) -> Path:
    output_file = Path(output_path)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    with open(output_file, 'w', encoding='utf-8', newline='\n') as f:
        f.write(to_json(report))
    logger.info(f"报告已导出到: {output_file}")
    return output_file
