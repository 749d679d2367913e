# -*- coding: utf-8 -*-
"""
公共夹具：示例叶状结构文档，以及把应用目录重定向到临时目录
"""
from pathlib import Path

import pytest

from folhol.dsl import parse_file
from folhol.pointwise import clear_cache

EXAMPLES_DIR = Path(__file__).resolve().parent.parent / "examples_fol"


@pytest.fixture(autouse=True)
def app_home(tmp_path, monkeypatch):
    home = tmp_path / "home"
    monkeypatch.setenv("FOLHOL_HOME", str(home))
    monkeypatch.delenv("FOLHOL_CONFIG", raising=False)
    monkeypatch.delenv("FOLHOL_TOL", raising=False)
    monkeypatch.chdir(tmp_path)
    yield home
    clear_cache()


def load_example(name):
    return parse_file(EXAMPLES_DIR / f"{name}.fol")


@pytest.fixture
def example_path():
    return lambda name: str(EXAMPLES_DIR / f"{name}.fol")


@pytest.fixture
def rotation_doc():
    return load_example("rotation")


@pytest.fixture
def rotation(rotation_doc):
    return rotation_doc.to_foliation()


@pytest.fixture
def xdx():
    return load_example("xdx").to_foliation()


@pytest.fixture
def xdx_x2dx():
    return load_example("xdx_x2dx").to_foliation()


@pytest.fixture
def x2dx_x3dx():
    return load_example("x2dx_x3dx").to_foliation()


@pytest.fixture
def torus_doc():
    return load_example("torus")


@pytest.fixture
def torus(torus_doc):
    return torus_doc.to_foliation()


@pytest.fixture
def closed_form_doc():
    return load_example("closed_form")
