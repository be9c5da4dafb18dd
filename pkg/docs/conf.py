# -*- coding: utf-8 -*-
#
# polyslice documentation build configuration file.
import sys
import os

import sphinx_rtd_theme


sys.path.insert(0, os.path.abspath('..'))
import polyslice

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'numpydoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'polyslice'
copyright = u'2026, polyslice developers'
author = u'polyslice developers'

# The full version, including alpha/beta/rc tags.
release = polyslice.__version__
# The short X.Y version.
version = u'.'.join(release.split('.')[:2])

language = None
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'

# numpydoc generates one autosummary table per class otherwise.
numpydoc_show_class_members = False

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
html_static_path = ['_static']
htmlhelp_basename = 'polyslicedoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    (master_doc, 'polyslice.tex', u'polyslice Documentation',
     u'polyslice developers', 'manual'),
]

man_pages = [
    (master_doc, 'polyslice', u'polyslice Documentation', [author], 1)
]

intersphinx_mapping = {'python': ('https://docs.python.org/3', None),
                       'numpy': ('https://numpy.org/doc/stable', None),
                       'scipy': ('https://docs.scipy.org/doc/scipy', None)}
