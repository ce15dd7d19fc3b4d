# -*- coding: utf-8 -*-
#
# decoykey documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
from datetime import date

# -- General configuration ------------------------------------------------

source_suffix = '.rst'
master_doc = 'index'

# General information about the project.
year = date.today().year
project = u'decoykey'
copyright = u'2017-{}, Julien Le Cléach'.format(year)
author = u'Julien Le Cléach'

# The version is read from the package.
parent = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
version_txt = os.path.join(parent, 'decoykey', 'version.txt')
decoykey_version = open(version_txt).read().split('=')[1].strip()
version = decoykey_version
release = decoykey_version

exclude_patterns = ['.build']

pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

on_rtd = os.environ.get('READTHEDOCS', None) == 'True'
if not on_rtd:  # only import and set the theme if we're building docs locally
    import sphinx_rtd_theme
    html_theme = 'sphinx_rtd_theme'
    html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
