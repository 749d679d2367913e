# -*- coding: utf-8 -*-
"""
自由模子模的 Gröbner 基
Buchberger 算法，单项式序为分次反字典序，模分量上用位置之上的项序（TOP），
同一单项式时下标小的位置更大。每个基元素都记录它在原始生成元上的余因子，
因此除了判定成员关系，还可以给出显式的表示（lift）
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from sympy.polys.monomials import monomial_div, monomial_lcm
from sympy.polys.rings import PolyElement

from folhol.errors import DimensionError
from folhol.exactalg import linalg
from folhol.exactalg.poly import PolyVector, lead_divides, to_rational
from folhol.log import get_logger

logger = get_logger('groebner')

ORDER_TAG = "grevlex/TOP"


@dataclass(frozen=True)
class ModuleGB:
    """约化 Gröbner 基"""
    ambient_rank: int
    order: str
    basis: Tuple[PolyVector, ...]
    cofactors: Tuple[Tuple[PolyElement, ...], ...]
    provenance: Tuple[PolyVector, ...]

    @property
    def ring(self):
        return self.provenance[0].ring

    def leads(self):
        return [b.lead() for b in self.basis]


def _lead_of(ring, comps):
    best = None
    best_key = None
    order = ring.order
    for pos, comp in enumerate(comps):
        if not comp:
            continue
        monom = comp.LM
        key = (order(monom), -pos)
        if best_key is None or key > best_key:
            best_key = key
            best = (pos, monom, comp.LC)
    return best


def _divide(v, basis, leads):
    """
    多元除法（完全约化）

    Returns:
        (余式 PolyVector, 商列表)，满足 v = sum Q_k basis_k + r
    """
    ring = v.ring
    rank = v.dim
    p = list(v.components)
    remainder = [ring.zero] * rank
    quotients = [ring.zero] * len(basis)
    while True:
        lt = _lead_of(ring, p)
        if lt is None:
            break
        pos, monom, coeff = lt
        hit = None
        for k, (bpos, bmonom, bcoeff) in enumerate(leads):
            if bpos != pos:
                continue
            q = monomial_div(monom, bmonom)
            if q is not None:
                hit = (k, q, coeff / bcoeff)
                break
        if hit is None:
            term = ring.term_new(monom, coeff)
            remainder[pos] += term
            p[pos] -= term
            continue
        k, q, c = hit
        for idx, comp in enumerate(basis[k].components):
            if comp:
                p[idx] -= comp.mul_term((q, c))
        quotients[k] += ring.term_new(q, c)
    return PolyVector(ring, tuple(remainder)), quotients


def _combine(ring, quotients, cofactors, width):
    out = [ring.zero] * width
    for q, cof in zip(quotients, cofactors):
        if not q:
            continue
        for i in range(width):
            if cof[i]:
                out[i] += q * cof[i]
    return out


def _validate(generators):
    if not generators:
        raise DimensionError("生成元列表不能为空")
    first = generators[0]
    for g in generators[1:]:
        if g.dim != first.dim:
            raise DimensionError(f"生成元的秩不一致: {g.dim} != {first.dim}")
        if g.ring != first.ring:
            raise DimensionError("生成元属于不同的多项式环")


def module_groebner(generators: Sequence[PolyVector], order: str = ORDER_TAG) -> ModuleGB:
    """
    计算子模的约化 Gröbner 基

    Args:
        generators: 非空生成元列表（秩与变量个数一致）
        order: 单项式序标签，目前只支持 grevlex/TOP

    Returns:
        ModuleGB
    """
    if order != ORDER_TAG:
        raise ValueError(f"不支持的单项式序: {order}")
    generators = tuple(generators)
    _validate(generators)
    ring = generators[0].ring
    width = len(generators)

    work = []
    cofs = []
    for i, g in enumerate(generators):
        if g.is_zero():
            continue
        work.append(g)
        cofs.append(tuple(ring.one if j == i else ring.zero for j in range(width)))
    leads = [g.lead() for g in work]

    pending = set()
    for j in range(len(work)):
        for i in range(j):
            if leads[i][0] == leads[j][0]:
                pending.add((i, j))

    def pair_key(pair):
        i, j = pair
        lcm = monomial_lcm(leads[i][1], leads[j][1])
        return (sum(lcm), ring.order(lcm), i, j)

    reductions = 0
    while pending:
        pair = min(pending, key=pair_key)
        pending.discard(pair)
        i, j = pair
        lcm = monomial_lcm(leads[i][1], leads[j][1])

        # Buchberger 第二准则（链准则）
        skip = False
        for k in range(len(work)):
            if k in (i, j) or leads[k][0] != leads[i][0]:
                continue
            if monomial_div(lcm, leads[k][1]) is None:
                continue
            if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
                continue
            skip = True
            break
        if skip:
            continue

        mi = monomial_div(lcm, leads[i][1])
        mj = monomial_div(lcm, leads[j][1])
        ci = 1 / leads[i][2]
        cj = 1 / leads[j][2]
        s = work[i].mul_term(mi, ci) - work[j].mul_term(mj, cj)
        scof = [a.mul_term((mi, ci)) - b.mul_term((mj, cj)) for a, b in zip(cofs[i], cofs[j])]

        r, quotients = _divide(s, work, leads)
        reductions += 1
        if r.is_zero():
            continue
        qcomb = _combine(ring, quotients, cofs, width)
        rcof = tuple(a - b for a, b in zip(scof, qcomb))
        work.append(r)
        cofs.append(rcof)
        leads.append(r.lead())
        new = len(work) - 1
        for k in range(new):
            if leads[k][0] == leads[new][0]:
                pending.add((k, new))

    # 极小化：去掉首项可被其他首项整除的元素
    keep = []
    for i in range(len(work)):
        redundant = False
        for j in range(len(work)):
            if i == j or not lead_divides(leads[j], leads[i]):
                continue
            if leads[j][1] != leads[i][1] or j < i:
                redundant = True
                break
        if not redundant:
            keep.append(i)
    basis = [work[i] for i in keep]
    bcofs = [cofs[i] for i in keep]

    # 自约化并首一化
    for idx in range(len(basis)):
        others = [b for k, b in enumerate(basis) if k != idx]
        other_cofs = [c for k, c in enumerate(bcofs) if k != idx]
        g = basis[idx]
        lead = g.lead()
        tail = PolyVector(ring, tuple(
            comp - ring.term_new(lead[1], lead[2]) if pos == lead[0] else comp
            for pos, comp in enumerate(g.components)))
        r, quotients = _divide(tail, others, [o.lead() for o in others])
        qcomb = _combine(ring, quotients, other_cofs, width)
        reduced = PolyVector(ring, tuple(
            comp + ring.term_new(lead[1], lead[2]) if pos == lead[0] else comp
            for pos, comp in enumerate(r.components)))
        rcof = [a - b for a, b in zip(bcofs[idx], qcomb)]
        inv = 1 / lead[2]
        basis[idx] = reduced.scale(inv)
        bcofs[idx] = tuple(c.mul_ground(inv) for c in rcof)

    order_fn = ring.order
    ranked = sorted(range(len(basis)),
                    key=lambda k: (order_fn(basis[k].lead()[1]), -basis[k].lead()[0]),
                    reverse=True)
    logger.debug(f"Gröbner 基完成: {len(generators)} 个生成元 -> {len(ranked)} 个基元素, "
                 f"{reductions} 次 S 对约化")
    return ModuleGB(
        ambient_rank=generators[0].dim,
        order=order,
        basis=tuple(basis[k] for k in ranked),
        cofactors=tuple(bcofs[k] for k in ranked),
        provenance=generators,
    )


def _check_rank(v, gb):
    if v.dim != gb.ambient_rank:
        raise DimensionError(f"向量的秩 {v.dim} 与模的秩 {gb.ambient_rank} 不匹配")
    if v.ring != gb.ring:
        raise DimensionError("向量与 Gröbner 基属于不同的多项式环")


def normal_form(v: PolyVector, gb: ModuleGB) -> PolyVector:
    """关于约化 Gröbner 基的正规形"""
    _check_rank(v, gb)
    r, _ = _divide(v, gb.basis, gb.leads())
    return r


def is_member(v: PolyVector, gb: ModuleGB) -> bool:
    return normal_form(v, gb).is_zero()


def lift(v: PolyVector, gb: ModuleGB) -> Optional[Tuple[PolyElement, ...]]:
    """
    把子模中的元素表示为原始生成元的组合

    Returns:
        余因子元组 (f_1, ..., f_m)，满足 v = sum f_i * provenance_i；v 不在子模中时返回 None
    """
    _check_rank(v, gb)
    r, quotients = _divide(v, gb.basis, gb.leads())
    if not r.is_zero():
        return None
    return tuple(_combine(gb.ring, quotients, gb.cofactors, len(gb.provenance)))


def linear_relation_space(candidates: Sequence[PolyVector], gb: ModuleGB):
    """
    {c in QQ^n : sum c_i * candidate_i 属于子模} 的一组基

    正规形是 QQ-线性的，所以这是 c -> normal_form(sum c_i candidate_i) 的核
    """
    candidates = tuple(candidates)
    for c in candidates:
        _check_rank(c, gb)
    if not candidates:
        return []
    forms = [normal_form(c, gb) for c in candidates]
    keys = set()
    for f in forms:
        for pos, comp in enumerate(f.components):
            for monom in comp.keys():
                keys.add((pos, monom))
    keys = sorted(keys)
    rows = []
    for pos, monom in keys:
        rows.append([f.components[pos].get(monom, gb.ring.domain.zero) for f in forms])
    return linalg.nullspace(rows, len(candidates))


def combination(vectors, coeffs):
    """sum coeffs_i * vectors_i（系数为有理数或多项式）"""
    vectors = list(vectors)
    acc = PolyVector.zero(vectors[0].ring, vectors[0].dim)
    for v, c in zip(vectors, coeffs):
        if isinstance(c, PolyElement):
            if c:
                acc = acc + v.scale(c)
        else:
            c = to_rational(c)
            if c:
                acc = acc + v.scale(c)
    return acc


def ideal_times_module(generators, point, indices=None):
    """
    I_a * <generators> 的生成元：(x_j - a_j) * X_i

    Args:
        generators: 向量场生成元
        point: 有理点 a（长度等于变量个数）
        indices: 只取这些变量（用于坐标子空间 L 的理想 I_L）；None 表示全部
    """
    generators = tuple(generators)
    ring = generators[0].ring
    if len(point) != ring.ngens:
        raise DimensionError(f"点的维数 {len(point)} 与变量个数 {ring.ngens} 不匹配")
    js = range(ring.ngens) if indices is None else indices
    out = []
    for x_i in generators:
        for j in js:
            factor = ring.gens[j] - to_rational(point[j])
            out.append(x_i.scale(factor))
    return tuple(out)


def point_module_groebner(generators, point):
    """I_x F 的 Gröbner 基"""
    return module_groebner(ideal_times_module(generators, point))
