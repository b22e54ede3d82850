#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
结构目标可控性分析工具日志管理器
负责管理库内部运行日志与命令行会话日志

库代码只通过 log_* 函数写日志；是否落盘由命令行会话决定
（start_session），测试与库调用不会触碰文件系统。
"""

import sys
import logging
import datetime
from pathlib import Path

LOGGER_NAME = 'structural_target_control'
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'


class LogManager:
    """日志管理器 - 统一管理所有日志输出"""

    def __init__(self):
        # 程序启动时间
        self.start_time = datetime.datetime.now()

        # 当前网络信息（用于最终日志文件命名）
        self.network_name = None

        # 日志文件相关
        self.log_dir = None
        self.log_file = None
        self.file_handler = None

        self.file_logger = logging.getLogger(LOGGER_NAME)
        self.file_logger.setLevel(logging.DEBUG)
        self.file_logger.propagate = False

        # 清除已有的处理器
        for handler in self.file_logger.handlers[:]:
            self.file_logger.removeHandler(handler)

        # 终端处理器：stderr，stdout 留给报告
        self.console_handler = logging.StreamHandler(sys.stderr)
        self.console_handler.setLevel(logging.WARNING)
        self.console_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))
        self.file_logger.addHandler(self.console_handler)

    def set_verbose(self, verbose=True):
        """终端输出级别：verbose 时输出全部调试信息"""
        self.console_handler.setLevel(logging.DEBUG if verbose else logging.WARNING)

    def start_session(self, log_dir="log"):
        """开启会话日志文件（临时文件名，结束时重命名）"""
        if self.file_handler is not None:
            return self.log_file

        self.start_time = datetime.datetime.now()
        self.log_dir = Path(log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)
        self.log_file = self.log_dir / f"temp_log_{self.start_time.strftime('%Y%m%d_%H%M%S')}.log"

        self.file_handler = logging.FileHandler(self.log_file, encoding='utf-8')
        self.file_handler.setLevel(logging.DEBUG)
        self.file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))
        self.file_logger.addHandler(self.file_handler)

        # 记录会话启动
        self.file_logger.info("=" * 60)
        self.file_logger.info("结构目标可控性分析启动")
        self.file_logger.info(f"启动时间: {self.start_time}")
        self.file_logger.info(f"Python版本: {sys.version}")
        self.file_logger.info("=" * 60)
        return self.log_file

    def set_network_info(self, name, n=None, m=None):
        """设置当前网络信息"""
        self.network_name = name
        message = f"加载网络: {name}"
        if n is not None:
            message += f" (状态数 {n}, 输入数 {m})"
        self.info(message)

    def debug(self, message):
        """调试信息"""
        self.file_logger.debug(message)

    def info(self, message):
        """一般信息"""
        self.file_logger.info(message)

    def warning(self, message):
        """警告信息"""
        self.file_logger.warning(message)

    def error(self, message):
        """错误信息"""
        self.file_logger.error(message)

    def status(self, message):
        """状态信息"""
        self.file_logger.info(f"STATUS: {message}")

    def command(self, action, details=""):
        """命令行操作记录"""
        message = f"命令: {action}"
        if details:
            message += f" - {details}"
        self.file_logger.info(message)

    def performance(self, operation, duration, details=""):
        """性能记录"""
        message = f"性能: {operation} 耗时 {duration:.3f}秒"
        if details:
            message += f" - {details}"
        self.file_logger.info(message)

    def data_info(self, info_type, data):
        """数据信息记录"""
        self.file_logger.info(f"数据: {info_type} - {data}")

    def finalize_log(self):
        """会话结束时整理日志文件，返回最终路径（未开启会话时返回 None）"""
        if self.file_handler is None:
            return None

        end_time = datetime.datetime.now()
        duration = end_time - self.start_time

        self.file_logger.info("=" * 60)
        self.file_logger.info("结构目标可控性分析结束")
        self.file_logger.info(f"结束时间: {end_time}")
        self.file_logger.info(f"运行时长: {duration}")
        self.file_logger.info("=" * 60)

        # 关闭文件处理器
        self.file_handler.close()
        self.file_logger.removeHandler(self.file_handler)
        self.file_handler = None

        name = self.network_name or "Unknown"
        safe_name = "".join(c if c.isalnum() or c in "-_" else "_" for c in name)
        start_str = self.start_time.strftime('%Y%m%d_%H%M%S')
        end_str = end_time.strftime('%Y%m%d_%H%M%S')
        final_path = self.log_dir / f"{safe_name}_{start_str}_{end_str}.log"

        try:
            if self.log_file.exists():
                self.log_file.rename(final_path)
                self.log_file = final_path
        except OSError as e:
            self.file_logger.error(f"保存日志文件失败: {e}")
            return self.log_file
        return final_path

    def get_recent_logs(self, count=50):
        """获取最近的日志条目"""
        try:
            if self.log_file and self.log_file.exists():
                with open(self.log_file, 'r', encoding='utf-8') as f:
                    lines = f.readlines()
                    return lines[-count:]
        except OSError as e:
            self.file_logger.error(f"读取日志文件失败: {e}")
        return []


# 全局日志管理器实例
logger = LogManager()


def log_debug(message):
    """全局调试日志函数"""
    logger.debug(message)


def log_info(message):
    """全局信息日志函数"""
    logger.info(message)


def log_warning(message):
    """全局警告日志函数"""
    logger.warning(message)


def log_error(message):
    """全局错误日志函数"""
    logger.error(message)


def log_status(message):
    """全局状态日志函数"""
    logger.status(message)


def log_command(action, details=""):
    """全局命令日志函数"""
    logger.command(action, details)


def log_performance(operation, duration, details=""):
    """全局性能日志函数"""
    logger.performance(operation, duration, details)


def log_data_info(info_type, data):
    """全局数据信息日志函数"""
    logger.data_info(info_type, data)
