# -*- coding: utf-8 -*-
"""
报告组装与输出
- certificate_section / monte_carlo_section / augmentation_section: 判定结果 -> 可 JSON 序列化的字典（对外1起编号）
- render_json / render_text: 两种输出格式

报告中不含时间戳，给定 (文档, 参数, 种子, 版本) 时输出逐字节一致。
"""

import json

from stc_structural import reachability_path

QUESTION_NAMES = {
    'controllability': '结构可控性',
    'target-controllability': '结构目标可控性',
}


def _label_set(labels):
    return "{" + ", ".join(labels) + "}"


def matching_entries(digraph, matching):
    """匹配边按右顶点排序，输出 [左标记, 右标记]"""
    return [[digraph.vertex_label(l), digraph.vertex_label(r)]
            for r, l in sorted(matching.by_right.items())]


def certificate_section(digraph, verdict, detail=False):
    """证书：不可达状态、Hall 违反集合与邻域、匹配；detail 时附可达路径"""
    hall = verdict.hall
    section = {
        'failure': verdict.failure,
        'unreachable': [v + 1 for v in verdict.unreachable],
        'violating_set': sorted(v + 1 for v in hall.violating_set) if hall.violating_set else [],
        'neighborhood': [digraph.vertex_label(v) for v in sorted(hall.neighborhood)]
        if hall.neighborhood is not None else [],
        'matching': matching_entries(digraph, hall.matching),
    }
    if detail:
        relevant = verdict.targets.indices if verdict.targets is not None else range(digraph.n)
        section['reachability'] = {
            digraph.vertex_label(v): [digraph.vertex_label(w)
                                      for w in reachability_path(verdict.forest, v)]
            for v in relevant if v in verdict.forest
        }
    return section


def monte_carlo_section(summary):
    if summary is None:
        return None
    return {
        'trials': summary.trials,
        'seed': summary.seed,
        'ranks': list(summary.ranks),
        'full_rank': summary.rows,
        'rank_bound': summary.rank_bound,
        'agree_count': summary.agree_count,
        'agreement': summary.agreement,
        'retried': list(summary.retried),
        'anomalies': list(summary.anomalies),
        'normalized': summary.normalized,
        'pruned': [v + 1 for v in summary.pruned],
    }


def augmentation_section(plan, m, verified):
    if plan is None:
        return None
    return {
        'attachments': [{'input': f"u{m + offset + 1}", 'state': state + 1}
                        for offset, state in enumerate(plan.attachments)],
        'size': plan.size,
        'lower_bound': plan.lower_bound,
        'verified': verified,
    }


def render_json(report):
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)


def _verdict_sentence(report):
    question = report['question']
    targets = report['targets']
    subject = QUESTION_NAMES.get(question, question)
    if targets:
        subject += f"（T = {_label_set(f'x{t}' for t in targets)}）"
    decision = report['decision']
    if decision is None:
        return f"{subject}: 必要条件全部满足；Ā 非对称结构化，无法断言充分性"
    if decision:
        return f"{subject}: 成立，系统是结构{'目标' if targets else ''}可控的"
    return f"{subject}: 不成立，系统不是结构{'目标' if targets else ''}可控的"


def render_text(report, detail=False):
    """x_i 记号的文本输出，例如 S = {x8, x10}, N(S) = {x9}"""
    lines = [_verdict_sentence(report)]
    cert = report['certificates']
    if cert['unreachable']:
        lines.append(f"输入不可达状态: {_label_set(f'x{v}' for v in cert['unreachable'])}")
    if cert['violating_set']:
        lines.append("Hall 条件不满足: "
                     f"S = {_label_set(f'x{v}' for v in cert['violating_set'])}, "
                     f"N(S) = {_label_set(cert['neighborhood'])}")
    if detail:
        pairs = ", ".join(f"{l}–{r}" for l, r in cert['matching'])
        lines.append(f"最大匹配: {pairs if pairs else '（空）'}")
        for state, path in sorted(cert.get('reachability', {}).items(),
                                  key=lambda item: int(item[0][1:])):
            lines.append(f"可达路径 {state}: {' → '.join(path)}")

    mc = report['monte_carlo']
    if mc is not None:
        ranks = sorted(set(mc['ranks']))
        line = (f"Monte-Carlo: {mc['trials']} 次试验 (种子 {mc['seed']}), "
                f"观察到的秩 {ranks}, 满秩 = {mc['full_rank']}, 上界 |N| = {mc['rank_bound']}")
        if mc['agreement'] is not None:
            line += f", 一致率 {mc['agreement']:.3f}"
        lines.append(line)
        if mc['anomalies']:
            lines.append(f"  不一致的试验: {mc['anomalies']}")

    aug = report['augmentation']
    if aug is not None:
        if aug['size'] == 0:
            lines.append("输入补充: 无需补充")
        else:
            items = ", ".join(f"{a['input']} → x{a['state']}" for a in aug['attachments'])
            lines.append(f"输入补充建议 ({aug['size']} 个, 下界 {aug['lower_bound']}): {items}")
    return "\n".join(lines)
