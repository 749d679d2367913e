# -*- coding: utf-8 -*-
"""
统一日志管理模块
提供项目级别的日志配置和初始化功能
日志统一写入用户目录（FOLHOL_HOME 或 ~/.folhol），控制台输出走 stderr，
stdout 只留给报告，保证报告逐字节确定
"""
import logging
import logging.handlers
import sys
import os
import platform
import datetime
import time
import zipfile
from pathlib import Path


APP_DIR_NAME = 'folhol'


def get_app_dir():
    """
    获取应用数据目录

    Returns:
        Path: 目录路径（不存在时自动创建）
    """
    env_home = os.environ.get('FOLHOL_HOME')
    if env_home:
        app_dir = Path(env_home)
    elif os.environ.get('LOCALAPPDATA'):
        app_dir = Path(os.environ['LOCALAPPDATA']) / APP_DIR_NAME
    else:
        app_dir = Path.home() / f'.{APP_DIR_NAME}'
    app_dir.mkdir(parents=True, exist_ok=True)
    return app_dir


def get_log_file_path():
    """
    获取日志文件路径，统一使用当前日期作为文件名
    """
    today = datetime.date.today().strftime("%Y-%m-%d")
    return get_app_dir() / f'{today}.log'


def cleanup_old_logs(log_dir, max_total_size_mb=50, max_days=7):
    """
    删除超过 max_days 天的日志，剩余日志总大小超过上限时从最旧的开始删

    日志系统尚未初始化，提示信息直接写 stderr
    """
    expire_before = time.time() - max_days * 86400
    budget = max_total_size_mb * 1024 * 1024
    try:
        entries = sorted(((f, f.stat()) for f in Path(log_dir).glob("*.log*") if f.is_file()),
                         key=lambda e: e[1].st_mtime)
    except OSError as e:
        print(f"[!] 无法读取日志目录 {log_dir}: {e}", file=sys.stderr)
        return

    total = sum(st.st_size for _, st in entries)
    for path, st in entries:
        expired = st.st_mtime < expire_before
        if not expired and total <= budget:
            continue
        try:
            path.unlink()
            total -= st.st_size
            print(f"[*] 已清理日志: {path.name}", file=sys.stderr)
        except OSError as e:
            print(f"[!] 无法删除日志文件 {path.name}: {e}", file=sys.stderr)


def init_logger(module_name, level=None):
    """
    初始化日志系统

    Args:
        module_name: 模块名称，将显示在日志条目中
        level: 日志级别字符串；为 None 时从配置文件 [logging] level 读取

    Returns:
        logging.Logger: 配置好的日志记录器
    """
    log_file_path = get_log_file_path()
    cleanup_old_logs(log_file_path.parent)

    if level is None:
        try:
            from folhol.config_manager import load_config, ConfigDecodingError
            level = load_config().get('logging', 'level', fallback='INFO')
        except ConfigDecodingError:
            level = 'INFO'
    log_level = getattr(logging, str(level).upper(), logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # 避免重复添加处理器（针对同进程内多次调用）
    has_console = any(isinstance(h, logging.StreamHandler) and not isinstance(h, logging.FileHandler)
                      for h in root_logger.handlers)
    has_file = any(isinstance(h, logging.FileHandler) and h.baseFilename == str(log_file_path.absolute())
                   for h in root_logger.handlers)

    log_format = '%(asctime)s - %(filename)s:%(lineno)d  - %(levelname)s - %(funcName)s - %(message)s'
    formatter = logging.Formatter(log_format)

    if not has_console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        console_handler.setLevel(log_level)
        root_logger.addHandler(console_handler)

    if not has_file:
        for handler in root_logger.handlers[:]:
            if isinstance(handler, logging.FileHandler):
                handler.close()
                root_logger.removeHandler(handler)

        # 单个文件上限 10MB，保留多个备份（总大小由 cleanup_old_logs 控制）
        file_handler = logging.handlers.RotatingFileHandler(
            str(log_file_path),
            maxBytes=10 * 1024 * 1024,
            backupCount=20,
            encoding='utf-8'
        )
        file_handler.setFormatter(formatter)
        file_handler.setLevel(log_level)
        root_logger.addHandler(file_handler)

    logger = logging.getLogger(module_name)
    logger.info(f"[INIT] 模块日志初始化: {module_name} -> {log_file_path.name}")
    return logger


def get_logger(module_name=None):
    """
    获取日志记录器

    Args:
        module_name: 模块名称，如果为 None 则返回 root logger

    Returns:
        logging.Logger: 日志记录器
    """
    if module_name:
        return logging.getLogger(module_name)
    return logging.getLogger()


def collect_environment_info():
    """收集运行环境信息（用于日志打包）"""
    lines = [
        "folhol 运行环境报告",
        f"生成时间: {datetime.datetime.now().strftime('%Y-%m-%d %H:%M:%S')}",
        "=" * 50,
        f"操作系统: {platform.system()} {platform.release()}",
        f"计算机架构: {platform.machine()}",
        f"Python: {sys.version.split()[0]}",
    ]
    for module_name in ('numpy', 'sympy', 'ply'):
        try:
            module = __import__(module_name)
            lines.append(f"{module_name}: {getattr(module, '__version__', '未知')}")
        except ImportError:
            lines.append(f"{module_name}: 未安装")
    return "\n".join(lines)


def pack_logs():
    """
    将日志目录打包成 ZIP 压缩包（放在应用数据目录下），附带运行环境信息。

    Returns:
        str | None: 打包文件路径，失败时返回 None
    """
    logger = get_logger('log')
    try:
        log_dir = get_app_dir()
        timestamp = datetime.datetime.now().strftime("%Y%m%d_%H%M%S")
        archive_path = log_dir / f"folhol_log_report_{timestamp}.zip"

        with zipfile.ZipFile(archive_path, 'w', zipfile.ZIP_DEFLATED) as zipf:
            for log_file_path in sorted(log_dir.glob("*.log")):
                zipf.write(log_file_path, log_file_path.name)
            config_file = log_dir / 'config.ini'
            if config_file.exists():
                zipf.write(config_file, config_file.name)
            zipf.writestr("environment_info.txt", collect_environment_info())

        logger.info(f"日志已打包: {archive_path}")
        return str(archive_path)
    except OSError as e:
        logger.error(f"打包日志失败: {e}")
        return None
