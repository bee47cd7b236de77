#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# Sphinx configuration of the xxzff documentation.

import os
import sys

sys.path.insert(0, os.path.abspath(".."))
import xxzff

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.doctest",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "xxzff"
copyright = "2024, The xxzff developers"
version = xxzff.__version__
release = xxzff.__version__

exclude_patterns = ["_build"]
pygments_style = "sphinx"

html_theme = "sphinxdoc"
html_show_sphinx = False
htmlhelp_basename = "xxzffdoc"

latex_documents = [
    ("index", "xxzff.tex", "xxzff Documentation", "The xxzff developers", "manual"),
]

man_pages = [("index", "xxzff", "xxzff Documentation", ["The xxzff developers"], 1)]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3/", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}

autoclass_content = "both"
