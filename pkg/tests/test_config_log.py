# -*- coding: utf-8 -*-
import json
import os
import time
import zipfile
from fractions import Fraction

import numpy as np
import pytest
from sympy.polys.domains import QQ

from folhol.config_manager import (
    ConfigDecodingError,
    default_settings,
    get_config_path,
    load_config,
    load_settings,
)
from folhol.flows import FlowConfig
from folhol.holonomy import HolonomyConfig
from folhol.log import cleanup_old_logs, get_app_dir, init_logger, pack_logs
from folhol.report import AnalysisResult, Report, encode, format_report, to_json


def test_defaults_are_created_in_app_dir(app_home):
    assert get_config_path() == app_home / 'config.ini'
    cfg = load_config()
    assert (app_home / 'config.ini').exists()
    settings = load_settings(cfg)
    assert settings.rel_tol == 1e-10
    assert settings.validity_box == 1.0
    assert settings.bch_order == 8
    assert settings.face_samples == 41


def test_local_config_overrides_defaults(tmp_path):
    (tmp_path / 'config.ini').write_text("[holonomy]\nvalidity_box = 2.5\n", encoding='utf-8')
    settings = load_settings()
    assert settings.validity_box == 2.5
    assert settings.drift_tol == 1e-6
    assert HolonomyConfig.from_settings(settings).validity_box == 2.5


def test_env_tolerance_overrides_report_tol(monkeypatch):
    monkeypatch.setenv('FOLHOL_TOL', '1e-3')
    assert load_settings().report_tol == 1e-3


def test_explicit_missing_config_is_not_created(tmp_path, monkeypatch):
    target = tmp_path / 'elsewhere' / 'custom.ini'
    monkeypatch.setenv('FOLHOL_CONFIG', str(target))
    assert load_settings().max_steps == 1000000
    assert not target.exists()


@pytest.mark.parametrize("content", [
    "[flows]\nrel_tol = fast\n",
    "[flows]\nrel_tol = -1\n",
    "no section header\n",
])
def test_bad_config_raises_decoding_error(tmp_path, content):
    (tmp_path / 'config.ini').write_text(content, encoding='utf-8')
    with pytest.raises(ConfigDecodingError):
        load_settings()


def test_flow_config_from_defaults():
    cfg = FlowConfig.from_settings(default_settings())
    assert cfg.rel_tol == 1e-10
    assert cfg.box_radius == 1e6


def test_logger_writes_into_app_dir(app_home):
    logger = init_logger('tests', level='DEBUG')
    logger.info("日志测试")
    assert get_app_dir() == app_home
    assert list(app_home.glob('*.log'))
    archive = pack_logs()
    with zipfile.ZipFile(archive) as zf:
        assert 'environment_info.txt' in zf.namelist()


def test_encode_exact_and_float_values():
    assert encode(QQ(3, 4)) == {"num": 3, "den": 4}
    assert encode(Fraction(-2)) == {"num": -2, "den": 1}
    assert encode(0.1) == '0.10000000000000001'
    assert encode(np.array([[1.0, 0.5]])) == [['1', '0.5']]
    assert encode({"flag": True, "none": None}) == {"flag": True, "none": None}
    with pytest.raises(TypeError):
        encode(object())


def test_report_json_and_text():
    report = Report(input={"foliation": "rot"}, tolerances={"tol": 1e-6})
    report.add(AnalysisResult("classify", {"point": (QQ(1), QQ(1, 2))}, 'ok', {"classification": "Regular"}))
    text = to_json(report)
    payload = json.loads(text)
    assert list(payload) == sorted(payload)
    assert payload["results"][0]["params"]["point"][1] == {"num": 1, "den": 2}
    assert report.exit_code == 0
    rendered = format_report(report)
    assert "[classify] ok (point=" in rendered
    assert "  classification: Regular" in rendered
    report.add(AnalysisResult("isotropy", {}, 'error', {"error": "NonInvolutiveError"}))
    assert report.exit_code == 1


def test_cleanup_removes_expired_logs(tmp_path):
    old = tmp_path / "2020-01-01.log"
    new = tmp_path / "recent.log"
    old.write_text("old", encoding='utf-8')
    new.write_text("new", encoding='utf-8')
    stamp = time.time() - 30 * 86400
    os.utime(old, (stamp, stamp))
    cleanup_old_logs(tmp_path)
    assert not old.exists()
    assert new.exists()
