# -*- coding: utf-8 -*-
#
# schwarzflow documentation build configuration file.
#
# Only the values that differ from the Sphinx defaults are set here.

import sys
import os

# The package is documented from the source tree.
sys.path.insert(0, os.path.abspath('..'))
import schwarzflow

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'schwarzflow'
copyright = u'2026, schwarzflow developers'

version = '.'.join(schwarzflow.__version__.split('.')[:2])
release = schwarzflow.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'

# numpy and scipy are not needed to render the API pages.
autodoc_mock_imports = ['numpy', 'scipy']
autodoc_member_order = 'bysource'

# -- Options for HTML output ----------------------------------------------

html_theme = 'default'
html_theme_options = {"stickysidebar": "true",
                      "externalrefs": "true"}
html_static_path = ['_static']
htmlhelp_basename = 'schwarzflowdoc'

# -- Options for LaTeX and manual page output -----------------------------

latex_documents = [
  ('index', 'schwarzflow.tex', u'schwarzflow Documentation',
   u'schwarzflow developers', 'manual'),
]

man_pages = [
    ('command-line', 'schwarzflow', u'Ricci-flow checks near Euclidean '
     u'Schwarzschild', [u'schwarzflow developers'], 1)
]
