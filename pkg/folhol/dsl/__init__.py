# -*- coding: utf-8 -*-
"""
叶状结构描述语言
"""
from .parser import FoliationDocument, FolLexer, FolParser, parse, parse_file
from .printer import print_document

__all__ = [
    'FoliationDocument',
    'FolLexer',
    'FolParser',
    'parse',
    'parse_file',
    'print_document',
]
