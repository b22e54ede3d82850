#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
无向网络结构（目标）可控性分析 - 命令行入口
功能：
1. 读取 JSON 网络描述（n, m, edges, inputs, targets, metadata）
2. 判定结构可控性 / 结构目标可控性并给出证书
3. 可选 Monte-Carlo 数值复核与贪心输入补充建议
4. JSON 或文本报告；退出码 0 成功、2 输入错误、3 数值失败

用法示例:
    python3 stc_main.py analyze fixtures/example_ten_states.json --check target --verify
    python3 stc_main.py analyze fixtures/example_ten_states.json --check full --format text
    python3 stc_main.py fixtures
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from cli.report import (augmentation_section, certificate_section, monte_carlo_section,
                        render_json, render_text)
from cli.tools import load_network_file
from log_manager import log_command, log_data_info, log_error, log_performance, log_status, logger
from stc_decision import (apply_augmentation, decide, is_structurally_target_controllable,
                          monte_carlo_verify, suggest_input_augmentation)
from stc_graph import NetworkInputError, TargetSet, build_system_digraph
from stc_numeric import NumericOracleError, make_tolerances
from stc_structural import term_rank

APP_VERSION = "1.0.0"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"

DEFAULT_OPTIONS = {
    'check': None,
    'targets': None,
    'verify': False,
    'trials': 20,
    'seed': 0,
    'tol': None,
    'workers': 1,
    'certificate': False,
    'augment': False,
}


def run_analysis(doc, options=None):
    """按选项执行分析，返回报告字典"""
    settings = dict(DEFAULT_OPTIONS)
    settings.update(options or {})

    start = time.time()
    pattern = doc.to_pattern()
    targets = doc.target_set(settings.get('targets'))
    check = settings.get('check') or ('target' if targets is not None else 'full')
    if check not in ('full', 'target'):
        raise NetworkInputError(f"--check 只能为 full 或 target，当前为 {check!r}")
    if check == 'target' and targets is None:
        raise NetworkInputError("目标可控性分析需要目标集合（文档 targets 或 --targets）")
    if check == 'full':
        targets = None

    tol = make_tolerances({'rel_tol': settings.get('tol')})
    verdict = decide(pattern, targets)
    digraph = build_system_digraph(pattern)

    summary = None
    if settings.get('verify'):
        summary = monte_carlo_verify(pattern, targets, trials=int(settings.get('trials', 20)),
                                     seed=int(settings.get('seed', 0)), tol=tol,
                                     workers=int(settings.get('workers', 1)), verdict=verdict)

    augmentation = None
    if settings.get('augment'):
        goal = targets if targets is not None else TargetSet.full(pattern.n)
        plan = suggest_input_augmentation(pattern, goal)
        augmented = apply_augmentation(pattern, plan.attachments)
        verified = is_structurally_target_controllable(augmented, goal).decision
        augmentation = augmentation_section(plan, pattern.m, verified)

    report = {
        'question': verdict.question,
        'decision': verdict.decision,
        'necessity_only': verdict.necessity_only,
        'targets': targets.one_based() if targets is not None else None,
        'network': {'name': doc.name, 'n': doc.n, 'm': doc.m},
        'structure': {
            'term_rank_A': term_rank(pattern, 'A'),
            'term_rank_AB': term_rank(pattern, 'AB'),
            'rank_bound': verdict.rank_bound,
        },
        'certificates': certificate_section(digraph, verdict, settings.get('certificate')),
        'monte_carlo': monte_carlo_section(summary),
        'augmentation': augmentation,
        'tolerances': tol,
        'version': APP_VERSION,
    }
    log_data_info('项秩与秩上界', report['structure'])
    log_performance("分析", time.time() - start, f"{verdict.question}: {verdict.decision}")
    return report


def parse_target_list(text):
    """'2,6,8' -> [2, 6, 8]"""
    try:
        values = [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"目标列表格式错误: {text!r}（应为 2,6,8 形式）")
    if not values:
        raise argparse.ArgumentTypeError("目标列表不能为空")
    return values


def positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"必须为正整数: {text}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog='stc_main.py',
        description='无向网络的结构可控性与结构目标可控性分析')
    parser.add_argument('--version', action='version', version=f'%(prog)s {APP_VERSION}')
    parser.add_argument('--verbose', action='store_true', help='在 stderr 输出调试日志')
    parser.add_argument('--log-dir', default=None, help='会话日志目录（缺省不写文件）')
    subparsers = parser.add_subparsers(dest='command', required=True)

    analyze = subparsers.add_parser('analyze', help='分析一个 JSON 网络描述')
    analyze.add_argument('file', help='网络描述文件 (UTF-8 JSON)')
    analyze.add_argument('--check', choices=['full', 'target'], default=None,
                         help='full: 结构可控性；target: 结构目标可控性（缺省按是否有目标集合决定）')
    analyze.add_argument('--targets', type=parse_target_list, default=None,
                         help='目标状态，例如 2,6,8（覆盖文档中的 targets）')
    analyze.add_argument('--verify', action='store_true', help='Monte-Carlo 数值复核')
    analyze.add_argument('--trials', type=positive_int, default=20, help='复核试验次数 (默认 20)')
    analyze.add_argument('--seed', type=int, default=0, help='主随机种子 (默认 0)')
    analyze.add_argument('--tol', type=float, default=None, help='数值秩的相对容差 rel_tol')
    analyze.add_argument('--format', choices=['json', 'text'], default='json', help='输出格式')
    analyze.add_argument('--certificate', action='store_true', help='输出匹配与可达路径等证书细节')
    analyze.add_argument('--augment', action='store_true', help='给出贪心输入补充建议')
    analyze.add_argument('--workers', type=positive_int, default=1,
                         help='Monte-Carlo 并行进程数 (默认 1)')

    subparsers.add_parser('fixtures', help='列出内置的网络描述')
    return parser


def list_fixtures():
    """内置网络描述的 (文件名, 说明) 列表"""
    entries = []
    for path in sorted(FIXTURE_DIR.glob('*.json')):
        try:
            metadata = json.loads(path.read_text(encoding='utf-8')).get('metadata', {})
        except (OSError, json.JSONDecodeError):
            metadata = {}
        entries.append((path.name, metadata.get('description', '')))
    return entries


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logger.set_verbose(args.verbose)
    if args.log_dir:
        logger.start_session(args.log_dir)

    try:
        if args.command == 'fixtures':
            for name, description in list_fixtures():
                print(f"{name}\t{description}")
            return EXIT_OK

        log_command('analyze', args.file)
        doc = load_network_file(args.file)
        logger.set_network_info(doc.name, doc.n, doc.m)
        options = {
            'check': args.check,
            'targets': args.targets,
            'verify': args.verify,
            'trials': args.trials,
            'seed': args.seed,
            'tol': args.tol,
            'workers': args.workers,
            'certificate': args.certificate,
            'augment': args.augment,
        }
        report = run_analysis(doc, options)
        log_status(f"分析完成: decision = {report['decision']}")
        if args.format == 'text':
            print(render_text(report, detail=args.certificate))
        else:
            print(render_json(report))
        return EXIT_OK
    except (NumericOracleError, np.linalg.LinAlgError) as e:
        log_error(f"数值计算失败: {e}")
        print(f"数值计算失败: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NetworkInputError, ValueError) as e:
        log_error(f"输入错误: {e}")
        print(f"输入错误: {e}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        logger.finalize_log()


if __name__ == "__main__":
    sys.exit(main())
