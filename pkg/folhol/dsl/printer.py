# -*- coding: utf-8 -*-
"""
文档打印：把 FoliationDocument 写回可被 parse 读入的文本
"""
from folhol.exactalg.poly import format_vector


def _format_rational(value):
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _format_assignments(values):
    return " ".join(f"{var} = {_format_rational(v)}" for var, v in values)


def print_document(document) -> str:
    chart = document.chart
    lines = [
        f"foliation {document.name} {{",
        f"    chart dim {chart.dim} vars {' '.join(chart.var_names)};",
    ]
    for name, field in document.generators:
        body = format_vector(field, chart.var_names)
        if field.is_zero():
            body = f"0*d({chart.var_names[0]})"
        lines.append(f"    gen {name} = {body};")
    for keyword, table in (('leaf', document.leaves), ('slice', document.slices), ('point', document.points)):
        for name, values in table:
            lines.append(f"    {keyword} {name} = {{ {_format_assignments(values)} }};")
    lines.append("}")
    return "\n".join(lines) + "\n"
