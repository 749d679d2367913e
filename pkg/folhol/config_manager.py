# -*- coding: utf-8 -*-
"""
配置管理模块
读取 INI 配置（容差、积分参数、有效盒等），缺失的键使用内置默认值
查找顺序: $FOLHOL_CONFIG -> ./config.ini -> <应用目录>/config.ini
"""
import configparser
import os
from dataclasses import dataclass
from pathlib import Path

from folhol.log import get_app_dir, get_logger

logger = get_logger('config_manager')

DEFAULT_CONFIG = {
    'logging': {'level': 'INFO'},
    'flows': {
        'rel_tol': '1e-10',
        'abs_tol': '1e-12',
        'max_steps': '1000000',
        'box_radius': '1e6',
    },
    'holonomy': {
        'validity_box': '1.0',
        'drift_tol': '1e-6',
        'lift_cutoff': '1e-9',
        'lift_residual': '1e-7',
        'bch_order': '8',
        'grid_spacing': '0.1',
        'grid_radius': '0.5',
        'fixed_point_tol': '1e-8',
        'invariance_tol': '1e-6',
    },
    'probe': {'face_samples': '41'},
    'report': {'tol': '1e-6'},
}


class ConfigDecodingError(Exception):
    """配置文件解码错误"""
    pass


@dataclass(frozen=True)
class Settings:
    """类型化后的配置值"""
    log_level: str
    rel_tol: float
    abs_tol: float
    max_steps: int
    box_radius: float
    validity_box: float
    drift_tol: float
    lift_cutoff: float
    lift_residual: float
    bch_order: int
    grid_spacing: float
    grid_radius: float
    fixed_point_tol: float
    invariance_tol: float
    face_samples: int
    report_tol: float


def get_config_path():
    """
    获取配置文件路径

    Returns:
        Path: 第一个存在的候选路径；都不存在时返回应用目录下的 config.ini
    """
    env_path = os.environ.get('FOLHOL_CONFIG')
    if env_path:
        return Path(env_path)
    local_path = Path.cwd() / 'config.ini'
    if local_path.exists():
        return local_path
    return get_app_dir() / 'config.ini'


def _default_parser():
    cfg = configparser.ConfigParser()
    cfg.read_dict(DEFAULT_CONFIG)
    return cfg


def load_config():
    """读取配置文件，未出现的键保留默认值"""
    config_path = get_config_path()
    cfg = _default_parser()

    if not config_path.exists():
        create_default_config(config_path)
        return cfg

    try:
        with open(config_path, 'rb') as f:
            content = f.read().decode('utf-8')
        cfg.read_string(content)
    except UnicodeDecodeError:
        raise ConfigDecodingError(f"配置文件编码错误，无法解码: {config_path}")
    except configparser.Error as e:
        raise ConfigDecodingError(f"配置文件格式错误，无法解析: {e}")
    return cfg


def create_default_config(config_path=None):
    """创建默认配置文件"""
    config_path = Path(config_path) if config_path else get_app_dir() / 'config.ini'
    if os.environ.get('FOLHOL_CONFIG'):
        # 显式指定的路径不存在时不替用户生成
        return
    try:
        config_path.parent.mkdir(parents=True, exist_ok=True)
        save_config(_default_parser(), config_path)
        logger.info(f"默认配置文件已创建: {config_path}")
    except OSError as e:
        logger.warning(f"无法写入默认配置文件 {config_path}: {e}")


def save_config(cfg, config_path=None):
    """保存配置文件"""
    config_path = Path(config_path) if config_path else get_config_path()
    with open(config_path, 'w', encoding='utf-8') as f:
        cfg.write(f)


def load_settings(cfg=None):
    """
    把配置解析成 Settings

    Args:
        cfg: 已读取的 ConfigParser；为 None 时调用 load_config()

    Returns:
        Settings
    """
    if cfg is None:
        cfg = load_config()
    try:
        report_tol = cfg.getfloat('report', 'tol')
        env_tol = os.environ.get('FOLHOL_TOL')
        if env_tol:
            report_tol = float(env_tol)
            logger.debug(f"FOLHOL_TOL 覆盖默认比较容差: {report_tol}")
        settings = Settings(
            log_level=cfg.get('logging', 'level'),
            rel_tol=cfg.getfloat('flows', 'rel_tol'),
            abs_tol=cfg.getfloat('flows', 'abs_tol'),
            max_steps=cfg.getint('flows', 'max_steps'),
            box_radius=cfg.getfloat('flows', 'box_radius'),
            validity_box=cfg.getfloat('holonomy', 'validity_box'),
            drift_tol=cfg.getfloat('holonomy', 'drift_tol'),
            lift_cutoff=cfg.getfloat('holonomy', 'lift_cutoff'),
            lift_residual=cfg.getfloat('holonomy', 'lift_residual'),
            bch_order=cfg.getint('holonomy', 'bch_order'),
            grid_spacing=cfg.getfloat('holonomy', 'grid_spacing'),
            grid_radius=cfg.getfloat('holonomy', 'grid_radius'),
            fixed_point_tol=cfg.getfloat('holonomy', 'fixed_point_tol'),
            invariance_tol=cfg.getfloat('holonomy', 'invariance_tol'),
            face_samples=cfg.getint('probe', 'face_samples'),
            report_tol=report_tol,
        )
    except ValueError as e:
        raise ConfigDecodingError(f"配置值类型错误: {e}")
    if settings.rel_tol <= 0 or settings.abs_tol <= 0:
        raise ConfigDecodingError("积分容差必须为正数")
    return settings


def default_settings():
    """不读文件的内置默认配置"""
    return load_settings(_default_parser())
