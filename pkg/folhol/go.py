# -*- coding: utf-8 -*-
"""
命令行入口
    folhol <command> <file.fol> [--point ...] [--lambda ...] [--xi ...] [--slice ...] [--json out.json] [--tol ...]

退出码：0 成功，1 分析错误（错误信息写入报告），2 解析错误
"""
import argparse
import sys

from folhol.config_manager import ConfigDecodingError, default_settings, load_settings
from folhol.dsl import parse_file
from folhol.errors import DSLSyntaxError, FolholError
from folhol.exactalg.poly import format_poly, format_vector, to_rational
from folhol.flows import FlowConfig, TimeDependentField, time_poly
from folhol.foliation import bracket_table, involutivity_check, slice_restriction
from folhol.holonomy import (
    HolonomyConfig,
    PathHolonomyBiSubmersion,
    delta_map,
    discreteness_linear_probe,
    exponential_condition_witness_check,
    kernel_linear_probe,
    linear_holonomy,
)
from folhol.log import get_logger, init_logger, pack_logs
from folhol.pointwise import (
    algebroid_local_data,
    check_jacobi,
    classify_point,
    codimension,
    fiber_report,
    isotropy_algebra,
    lie_algebra_analysis,
)
from folhol.report import AnalysisResult, Report, format_report, save_report

logger = get_logger('go')

EXIT_OK = 0
EXIT_ANALYSIS_ERROR = 1
EXIT_PARSE_ERROR = 2


# ---------- 参数解析 ----------
def _split(text):
    return [p for p in text.replace(';', ',').split(',') if p.strip()]


def parse_point(document, text):
    """命名点或逗号分隔的有理数；单个值广播到所有坐标"""
    if text is None:
        return tuple(to_rational(0) for _ in document.chart.var_names)
    if text in dict(document.points):
        return document.point(text)
    values = [to_rational(p.strip()) for p in _split(text)]
    if len(values) == 1:
        values = values * document.chart.dim
    return tuple(values)


def parse_floats(text, size):
    values = [float(p) for p in _split(text)]
    if len(values) == 1 and size > 1:
        values = values * size
    return values


def _pair_name(names, i, j):
    return f"[{names[i]},{names[j]}]"


# ---------- 分析命令 ----------
def run_fiber(document, foliation, args, ctx):
    point = parse_point(document, args.point)
    report = fiber_report(foliation, point)
    names = foliation.generator_names
    return {"point": point}, {
        "dim_fiber": report.dim_fiber,
        "dim_tangent": report.dim_tangent,
        "dim_isotropy": report.dim_isotropy,
        "fiber_basis": [names[i] for i in report.fiber_basis_indices],
        "relations": [list(r) for r in report.relation_basis],
    }


def run_classify(document, foliation, args, ctx):
    point = parse_point(document, args.point)
    return {"point": point}, {
        "classification": classify_point(foliation, point),
        "codimension": codimension(foliation, point),
    }


def run_isotropy(document, foliation, args, ctx):
    point = parse_point(document, args.point)
    presentation = isotropy_algebra(foliation, point)
    analysis = lie_algebra_analysis(presentation)
    return {"point": point}, {
        "dim": presentation.dim,
        "witnesses": list(presentation.basis_witnesses),
        "structure_constants": presentation.structure_constants,
        "jacobi": check_jacobi(presentation),
        "abelian": analysis.abelian,
        "nilpotent": analysis.nilpotent,
        "solvable": analysis.solvable,
        "derived_series": list(analysis.derived_series),
        "lower_central_series": list(analysis.lower_central_series),
        "center_dim": analysis.center_dim,
    }


def run_involutivity(document, foliation, args, ctx):
    result = involutivity_check(foliation)
    names = foliation.generator_names
    data = {
        "status": result.status,
        "witnesses": {_pair_name(names, i, j): [format_poly(c) for c in cof]
                      for (i, j), cof in sorted(result.witnesses.items())},
    }
    if result.failing_pair is not None:
        data["failing_pair"] = _pair_name(names, *result.failing_pair)
    return {}, data


def run_bracket_table(document, foliation, args, ctx):
    names = foliation.generator_names
    table = {}
    for entry in bracket_table(foliation):
        table[_pair_name(names, entry.i, entry.j)] = {
            "bracket": format_vector(entry.bracket),
            "witness": None if entry.witness is None else [format_poly(c) for c in entry.witness],
        }
    return {}, {"brackets": table}


def run_algebroid(document, foliation, args, ctx):
    if not args.leaf:
        raise FolholError("algebroid 需要 --leaf")
    leaf = document.leaf(args.leaf)
    data = algebroid_local_data(foliation, leaf)
    var_names = data.leaf_var_names
    names = data.frame_names
    anchors = {n: format_vector(a, var_names) if var_names else "0" for n, a in zip(names, data.anchor_table)}
    brackets = {}
    for (a, b), coeffs in sorted(data.nonzero_brackets().items()):
        if a < b:
            brackets[_pair_name(names, a, b)] = {names[c]: format_poly(p) for c, p in enumerate(coeffs) if p}
    return {"leaf": args.leaf}, {
        "leaf": leaf.describe(),
        "frame": list(names),
        "anchor": anchors,
        "brackets": brackets,
    }


def _bisubmersion(foliation, point, ctx):
    return PathHolonomyBiSubmersion.build(foliation, point, flow_config=ctx["flow_config"], config=ctx["config"])


def run_holonomy(document, foliation, args, ctx):
    point = parse_point(document, args.point)
    U = _bisubmersion(foliation, point, ctx)
    params = {"point": point}
    data = {}
    if args.lam is not None:
        presentation = isotropy_algebra(foliation, point)
        coeffs = parse_floats(args.lam, presentation.dim)
        delta = delta_map(U, coeffs, presentation.basis_witnesses)
        xi = delta.xi
        params["lambda"] = coeffs
        data["delta_xi"] = list(delta.xi)
        data["drift"] = delta.drift
    else:
        xi = parse_floats(args.xi or "0", U.n)
        params["xi"] = xi
    hol = linear_holonomy(U, xi)
    data.update({
        "generators": [foliation.generator_names[i] for i in U.generator_indices],
        "jacobian": hol.full_jacobian,
        "normal_matrix": hol.normal_matrix,
        "invariance_defect": hol.invariance_defect,
    })
    return params, data


def run_probe_kernel(document, foliation, args, ctx):
    point = parse_point(document, args.point)
    U = _bisubmersion(foliation, point, ctx)
    xi = parse_floats(args.xi or "0", U.n)
    result = kernel_linear_probe(U, xi, ctx["tol"])
    return {"point": point, "xi": xi}, {
        "verdict": result.verdict,
        "normal_matrix": result.normal_matrix,
        "distance": result.distance,
    }


def run_probe_discreteness(document, foliation, args, ctx):
    point = parse_point(document, args.point)
    slice_spec = document.slice(args.slice) if args.slice else None
    result = discreteness_linear_probe(foliation, point, slice_spec, ctx["config"])
    params = {"point": point}
    if args.slice:
        params["slice"] = args.slice
    return params, {
        "kind": result.kind,
        "radius": result.radius,
        "max_imag": result.max_imag,
        "degenerate": result.degenerate,
    }


def parse_time_field(fields, names_text, coeffs_text):
    """
    --field 给出逗号分隔的生成元名，--time-coeffs 给出每个生成元的升幂系数（生成元之间用分号分隔）
    例如 --field X1,X2 --time-coeffs "1,2;0,0,1" 表示 X_t = (1 + 2t) X1 + t^2 X2
    """
    names = [n.strip() for n in names_text.split(',') if n.strip()]
    for name in names:
        if name not in fields:
            raise FolholError(f"未知的生成元 {name!r}")
    if coeffs_text is None:
        blocks = [["1"]] * len(names)
    else:
        blocks = [[c.strip() for c in b.split(',') if c.strip()] for b in coeffs_text.split(';')]
    if len(blocks) != len(names) or not all(blocks):
        raise FolholError(f"--time-coeffs 需要 {len(names)} 组系数，实际为 {coeffs_text!r}")
    return TimeDependentField(tuple((time_poly(b), fields[n]) for n, b in zip(names, blocks)))


def run_check_witness(document, foliation, args, ctx):
    if not args.field or not args.z:
        raise FolholError("check-witness 需要 --field 和 --z")
    point = parse_point(document, args.point)
    target = foliation
    params = {"point": point, "field": args.field, "z": args.z}
    if args.time_coeffs:
        params["time_coeffs"] = args.time_coeffs
    if args.slice:
        slice_spec = document.slice(args.slice)
        target = slice_restriction(foliation, slice_spec)
        point = tuple(point[i] for i in slice_spec.free_indices)
        params["slice"] = args.slice
    fields = dict(zip(target.generator_names, target.generators))
    if args.z not in fields:
        raise FolholError(f"未知的生成元 {args.z!r}")
    field = parse_time_field(fields, args.field, args.time_coeffs)
    samples = [parse_floats(s, target.chart.dim) for s in (args.samples or "").split(';') if s.strip()]
    if not samples:
        samples = [[0.1 * (k + 1)] * target.chart.dim for k in range(3)]
    result = exponential_condition_witness_check(
        target, point, field, fields[args.z],
        samples, ctx["tol"], ctx["flow_config"])
    params["samples"] = samples
    return params, {"passed": result.passed, "max_deviation": result.max_deviation}


COMMANDS = {
    'fiber': run_fiber,
    'isotropy': run_isotropy,
    'classify': run_classify,
    'involutivity': run_involutivity,
    'bracket-table': run_bracket_table,
    'algebroid': run_algebroid,
    'holonomy': run_holonomy,
    'probe-kernel': run_probe_kernel,
    'probe-discreteness': run_probe_discreteness,
    'check-witness': run_check_witness,
}


def _settings():
    try:
        return load_settings()
    except ConfigDecodingError as e:
        logger.warning(f"配置文件无法读取，使用内置默认值: {e}")
        return default_settings()


def run(document, command, args, settings=None, source=None):
    """
    执行一条分析命令并收集成 Report；分析错误写入报告而不抛出
    """
    settings = settings or _settings()
    tol = args.tol if getattr(args, 'tol', None) is not None else settings.report_tol
    flow_config = FlowConfig.from_settings(settings)
    config = HolonomyConfig.from_settings(settings)
    ctx = {"tol": tol, "flow_config": flow_config, "config": config}

    foliation = document.to_foliation()
    report = Report(
        input={
            "file": source,
            "foliation": document.name,
            "vars": list(document.chart.var_names),
            "generators": {n: g for n, g in document.generators},
        },
        tolerances={
            "tol": tol,
            "rel_tol": flow_config.rel_tol,
            "abs_tol": flow_config.abs_tol,
            "drift_tol": config.drift_tol,
            "lift_cutoff": config.lift_cutoff,
            "validity_box": config.validity_box,
            "bch_order": config.bch_order,
        },
    )
    handler = COMMANDS[command]
    try:
        params, data = handler(document, foliation, args, ctx)
        report.add(AnalysisResult(command, params, 'ok', data))
        logger.info(f"{command} 完成: {document.name}")
    except (FolholError, KeyError, ValueError, TypeError) as e:
        logger.error(f"{command} 失败: {e}", exc_info=True)
        report.add(AnalysisResult(command, {}, 'error', {"error": type(e).__name__, "message": str(e)}))
    return report


# ---------- CLI ----------
def build_parser():
    parser = argparse.ArgumentParser(prog='folhol', description="奇异叶状结构分析")
    sub = parser.add_subparsers(dest='command', required=True)

    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument('file', help="叶状结构文档 (.fol)")
        p.add_argument('--point', help="命名点或逗号分隔的有理坐标，如 0,0 或 1/2,0")
        p.add_argument('--lambda', dest='lam', help="g_x 坐标（逗号分隔）")
        p.add_argument('--xi', help="双浸没纤维坐标（逗号分隔）")
        p.add_argument('--slice', help="文档中声明的切片名")
        p.add_argument('--leaf', help="文档中声明的叶名")
        p.add_argument('--field', help="check-witness: X_t 的生成元名（多个用逗号分隔）")
        p.add_argument('--time-coeffs', help="check-witness: 每个生成元的时间多项式升幂系数，生成元之间用分号分隔；缺省为自治")
        p.add_argument('--z', help="check-witness: 向量场 Z 的生成元名")
        p.add_argument('--samples', help="check-witness: 样本点，点之间用分号分隔")
        p.add_argument('--json', help="JSON 报告输出路径")
        p.add_argument('--tol', type=float, help="比较容差（覆盖 FOLHOL_TOL 和配置文件）")

    sub.add_parser('pack-logs', help="打包日志文件用于问题反馈")
    return parser


def main(argv=None):
    init_logger('go')
    args = build_parser().parse_args(argv)
    logger.info(f"main() 被调用，命令: {args.command}")

    if args.command == 'pack-logs':
        archive = pack_logs()
        if archive:
            print(archive)
            return EXIT_OK
        logger.error("日志报告生成失败")
        return EXIT_ANALYSIS_ERROR

    try:
        document = parse_file(args.file)
    except DSLSyntaxError as e:
        logger.error(f"解析失败: {e}")
        location = f"{args.file}:{e}" if e.line is not None else f"{args.file}: {e}"
        print(location, file=sys.stderr)
        return EXIT_PARSE_ERROR
    except OSError as e:
        logger.error(f"无法读取文档: {e}")
        print(f"{args.file}: {e}", file=sys.stderr)
        return EXIT_PARSE_ERROR

    report = run(document, args.command, args, source=args.file)
    sys.stdout.write(format_report(report))
    if args.json:
        save_report(report, args.json)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
