#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# gtaon documentation build configuration file.

import os
import sys
sys.path.insert(0, os.path.abspath('../..'))


# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.coverage',
    'sphinx.ext.viewcode',
    'sphinx.ext.autosummary',
    'numpydoc',
    'sphinx.ext.mathjax'
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'gtaon'
version = '0.1'
release = '0.1.0'

language = 'en'
exclude_patterns = []
pygments_style = 'sphinx'

numpydoc_show_class_members = False


# -- Options for HTML output ----------------------------------------------

html_theme = 'alabaster'
html_static_path = ['_static']
html_sidebars = {
    '**': [
        'about.html',
        'navigation.html',
        'relations.html',
        'searchbox.html',
    ]
}
htmlhelp_basename = 'gtaondoc'


# -- Options for LaTeX and manual page output ------------------------------

latex_documents = [
    (master_doc, 'gtaon.tex', 'gtaon Documentation', '', 'manual'),
]

man_pages = [
    (master_doc, 'gtaon', 'gtaon Documentation', [], 1)
]
