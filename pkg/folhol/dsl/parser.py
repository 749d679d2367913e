# -*- coding: utf-8 -*-
"""
叶状结构文档解析器（PLY lex/yacc）

文档格式:
    foliation rot {
        chart dim 2 vars x y;
        gen X = x*d(y) - y*d(x);
        leaf L = { y = 0 };
        slice S = { x = 1/2 };
        point p = { x = 1 y = 0 };
    }

系数只接受精确有理数（整数与 a/b），d(var) 为坐标导子
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Tuple

import ply.lex as lex
import ply.yacc as yacc

from folhol.errors import DSLSyntaxError
from folhol.exactalg.poly import PolyVector, to_rational
from folhol.foliation import Chart, CoordinateSubspace, Foliation
from folhol.log import get_logger

logger = get_logger('dsl')

Assignments = Tuple[Tuple[str, Fraction], ...]


def _column(data, lexpos):
    start = data.rfind('\n', 0, lexpos) + 1
    return lexpos - start + 1


class FolLexer:
    reserved = {
        'foliation': 'FOLIATION',
        'chart': 'CHART',
        'dim': 'DIM',
        'vars': 'VARS',
        'gen': 'GEN',
        'leaf': 'LEAF',
        'slice': 'SLICE',
        'point': 'POINT',
        'd': 'DERIV',
    }

    tokens = (
        'NAME', 'NUMBER',
        'LBRACE', 'RBRACE', 'LPAREN', 'RPAREN',
        'SEMI', 'EQUALS', 'PLUS', 'MINUS', 'TIMES', 'SLASH', 'POWER',
    ) + tuple(reserved.values())

    t_LBRACE = r'\{'
    t_RBRACE = r'\}'
    t_LPAREN = r'\('
    t_RPAREN = r'\)'
    t_SEMI = r';'
    t_EQUALS = r'='
    t_PLUS = r'\+'
    t_MINUS = r'-'
    t_TIMES = r'\*'
    t_SLASH = r'/'
    t_POWER = r'\*\*|\^'

    t_ignore = ' \t\r'
    t_ignore_COMMENT = r'\#[^\n]*'

    def t_FLOAT(self, t):
        r'\d*\.\d+([eE][-+]?\d+)?|\d+\.\d*([eE][-+]?\d+)?|\d+[eE][-+]?\d+'
        raise DSLSyntaxError(f"non-rational literal {t.value!r}, write it as a fraction such as 3/2",
                             t.lineno, _column(t.lexer.lexdata, t.lexpos))

    def t_NUMBER(self, t):
        r'\d+'
        t.value = int(t.value)
        return t

    def t_NAME(self, t):
        r'[A-Za-z_][A-Za-z_0-9]*'
        t.type = self.reserved.get(t.value, 'NAME')
        return t

    def t_newline(self, t):
        r'\n+'
        t.lexer.lineno += len(t.value)

    def t_error(self, t):
        raise DSLSyntaxError(f"illegal character {t.value[0]!r}",
                             t.lineno, _column(t.lexer.lexdata, t.lexpos))

    def build(self):
        return lex.lex(module=self, errorlog=lex.NullLogger())


# 表达式语法树节点: (种类, 值 / 子节点..., 行, 列)
def _node(kind, *args):
    return (kind,) + args


class FolParser:
    tokens = FolLexer.tokens
    start = 'document'

    precedence = (
        ('left', 'PLUS', 'MINUS'),
        ('left', 'TIMES', 'SLASH'),
        ('right', 'UMINUS'),
        ('right', 'POWER'),
    )

    def __init__(self):
        self.parser = yacc.yacc(module=self, write_tables=False, debug=False,
                                errorlog=yacc.NullLogger())

    def _pos(self, p, n):
        return p.lineno(n), _column(p.lexer.lexdata, p.lexpos(n))

    def p_document(self, p):
        'document : FOLIATION NAME LBRACE chart decls RBRACE'
        p[0] = _build_document(p[2], p[4], p[5])

    def p_document_no_chart(self, p):
        'document : FOLIATION NAME LBRACE decls RBRACE'
        line, col = self._pos(p, 3)
        raise DSLSyntaxError("chart declaration required", line, col)

    def p_chart(self, p):
        'chart : CHART DIM NUMBER VARS names SEMI'
        line, col = self._pos(p, 1)
        p[0] = (p[3], tuple(p[5]), line, col)

    def p_names(self, p):
        '''names : names NAME
                 | NAME'''
        p[0] = p[1] + [p[2]] if len(p) == 3 else [p[1]]

    def p_decls(self, p):
        '''decls : decls decl
                 | empty'''
        p[0] = p[1] + [p[2]] if len(p) == 3 else []

    def p_empty(self, p):
        'empty :'
        p[0] = None

    def p_decl_gen(self, p):
        'decl : GEN NAME EQUALS expr SEMI'
        line, col = self._pos(p, 2)
        p[0] = ('gen', p[2], p[4], line, col)

    def p_decl_assign(self, p):
        '''decl : LEAF NAME EQUALS LBRACE assignments RBRACE SEMI
                | SLICE NAME EQUALS LBRACE assignments RBRACE SEMI
                | POINT NAME EQUALS LBRACE assignments RBRACE SEMI'''
        line, col = self._pos(p, 2)
        p[0] = (p[1], p[2], tuple(p[5]), line, col)

    def p_assignments(self, p):
        '''assignments : assignments assignment
                       | assignment'''
        p[0] = p[1] + [p[2]] if len(p) == 3 else [p[1]]

    def p_assignment(self, p):
        'assignment : NAME EQUALS rational'
        line, col = self._pos(p, 1)
        p[0] = (p[1], p[3], line, col)

    def p_rational(self, p):
        '''rational : NUMBER
                    | NUMBER SLASH NUMBER
                    | MINUS rational'''
        if len(p) == 2:
            p[0] = Fraction(p[1])
        elif p[1] == '-':
            p[0] = -p[2]
        else:
            if p[3] == 0:
                line, col = self._pos(p, 3)
                raise DSLSyntaxError("division by zero", line, col)
            p[0] = Fraction(p[1], p[3])

    def p_expr_binop(self, p):
        '''expr : expr PLUS expr
                | expr MINUS expr
                | expr TIMES expr
                | expr SLASH expr'''
        line, col = self._pos(p, 2)
        p[0] = _node(p[2], p[1], p[3], line, col)

    def p_expr_power(self, p):
        'expr : expr POWER NUMBER'
        line, col = self._pos(p, 2)
        p[0] = _node('^', p[1], p[3], line, col)

    def p_expr_uminus(self, p):
        'expr : MINUS expr %prec UMINUS'
        line, col = self._pos(p, 1)
        p[0] = _node('neg', p[2], line, col)

    def p_expr_group(self, p):
        'expr : LPAREN expr RPAREN'
        p[0] = p[2]

    def p_expr_number(self, p):
        'expr : NUMBER'
        line, col = self._pos(p, 1)
        p[0] = _node('num', Fraction(p[1]), line, col)

    def p_expr_name(self, p):
        'expr : NAME'
        line, col = self._pos(p, 1)
        p[0] = _node('var', p[1], line, col)

    def p_expr_deriv(self, p):
        'expr : DERIV LPAREN NAME RPAREN'
        line, col = self._pos(p, 3)
        p[0] = _node('d', p[3], line, col)

    def p_error(self, t):
        if t is None:
            raise DSLSyntaxError("unexpected end of input", None, None)
        raise DSLSyntaxError(f"unexpected {t.value!r}", t.lineno, _column(t.lexer.lexdata, t.lexpos))


def _evaluate(node, chart):
    """
    表达式求值为 ('scalar', 多项式) 或 ('vector', PolyVector)
    """
    ring = chart.ring
    kind = node[0]
    line, col = node[-2], node[-1]
    if kind == 'num':
        return 'scalar', ring.ground_new(to_rational(node[1]))
    if kind in ('var', 'd'):
        name = node[1]
        if name not in chart.var_names:
            raise DSLSyntaxError(f"unknown variable {name!r}", line, col)
        idx = chart.var_names.index(name)
        if kind == 'var':
            return 'scalar', ring.gens[idx]
        return 'vector', PolyVector.unit(ring, chart.dim, idx)
    if kind == 'neg':
        k, v = _evaluate(node[1], chart)
        return k, -v
    if kind == '^':
        k, v = _evaluate(node[1], chart)
        if k != 'scalar':
            raise DSLSyntaxError("a vector field cannot be raised to a power", line, col)
        return 'scalar', v ** node[2]

    ka, a = _evaluate(node[1], chart)
    kb, b = _evaluate(node[2], chart)
    if kind in ('+', '-'):
        if ka != kb:
            raise DSLSyntaxError("cannot add a function and a vector field", line, col)
        return ka, (a + b if kind == '+' else a - b)
    if kind == '*':
        if ka == 'scalar' and kb == 'scalar':
            return 'scalar', a * b
        if ka == 'scalar' and kb == 'vector':
            return 'vector', b.scale(a)
        if ka == 'vector' and kb == 'scalar':
            return 'vector', a.scale(b)
        raise DSLSyntaxError("cannot multiply two vector fields", line, col)
    # '/'
    if kb != 'scalar' or not b.is_ground:
        raise DSLSyntaxError("only division by a rational constant is allowed", line, col)
    if not b:
        raise DSLSyntaxError("division by zero", line, col)
    inverse = 1 / b.LC
    return ka, (a.mul_ground(inverse) if ka == 'scalar' else a.scale(inverse))


def _check_assignments(chart, kind, name, assignments):
    seen = set()
    out = []
    for var, value, line, col in assignments:
        if var not in chart.var_names:
            raise DSLSyntaxError(f"unknown variable {var!r} in {kind} {name}", line, col)
        if var in seen:
            raise DSLSyntaxError(f"variable {var!r} assigned twice in {kind} {name}", line, col)
        seen.add(var)
        out.append((var, value))
    return tuple(out)


def _build_document(name, chart_decl, decls):
    dim, var_names, line, col = chart_decl
    if dim != len(var_names):
        raise DSLSyntaxError(f"chart declares dim {dim} but lists {len(var_names)} variables", line, col)
    if len(set(var_names)) != len(var_names):
        raise DSLSyntaxError(f"duplicate variable in chart: {list(var_names)}", line, col)
    chart = Chart(dim, var_names)

    generators = []
    named = {'gen': set(), 'leaf': set(), 'slice': set(), 'point': set()}
    sections = {'leaf': [], 'slice': [], 'point': []}
    for decl in decls:
        kind, decl_name = decl[0], decl[1]
        d_line, d_col = decl[-2], decl[-1]
        if decl_name in named[kind]:
            raise DSLSyntaxError(f"{kind} {decl_name} declared twice", d_line, d_col)
        named[kind].add(decl_name)
        if kind == 'gen':
            expr_kind, value = _evaluate(decl[2], chart)
            if expr_kind != 'vector':
                raise DSLSyntaxError(f"generator {decl_name} must be a vector field", d_line, d_col)
            generators.append((decl_name, value))
        else:
            sections[kind].append((decl_name, _check_assignments(chart, kind, decl_name, decl[2])))
    if not generators:
        raise DSLSyntaxError(f"foliation {name} declares no generators", line, col)
    return FoliationDocument(name, chart, tuple(generators),
                             tuple(sections['leaf']), tuple(sections['slice']), tuple(sections['point']))


@dataclass(frozen=True)
class FoliationDocument:
    """解析结果：名称、图卡、命名生成元以及叶 / 切片 / 点声明"""
    name: str
    chart: Chart
    generators: Tuple[Tuple[str, PolyVector], ...]
    leaves: Tuple[Tuple[str, Assignments], ...] = ()
    slices: Tuple[Tuple[str, Assignments], ...] = ()
    points: Tuple[Tuple[str, Assignments], ...] = ()

    @property
    def generator_names(self):
        return tuple(n for n, _ in self.generators)

    def to_foliation(self) -> Foliation:
        return Foliation(self.chart, tuple(g for _, g in self.generators), self.name, self.generator_names)

    @staticmethod
    def _lookup(table, kind, name):
        for n, values in table:
            if n == name:
                return values
        raise KeyError(f"{kind} {name!r} is not declared")

    def leaf(self, name) -> CoordinateSubspace:
        return CoordinateSubspace.from_names(self.chart, dict(self._lookup(self.leaves, 'leaf', name)))

    def slice(self, name) -> CoordinateSubspace:
        return CoordinateSubspace.from_names(self.chart, dict(self._lookup(self.slices, 'slice', name)))

    def point(self, name):
        """命名点，未赋值的坐标取 0"""
        values = dict(self._lookup(self.points, 'point', name))
        return tuple(to_rational(values.get(v, 0)) for v in self.chart.var_names)


@lru_cache(maxsize=1)
def _parser():
    return FolParser()


def parse(text: str) -> FoliationDocument:
    """
    解析文档文本

    Raises:
        DSLSyntaxError: 语法错误、未知变量、非有理数字面量等，带行列号
    """
    lexer = FolLexer().build()
    lexer.lineno = 1
    document = _parser().parser.parse(text, lexer=lexer)
    logger.debug(f"parsed foliation {document.name}: {len(document.generators)} generators")
    return document


def parse_file(path) -> FoliationDocument:
    with open(path, 'r', encoding='utf-8') as f:
        return parse(f.read())
