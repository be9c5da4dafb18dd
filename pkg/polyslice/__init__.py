# coding: utf-8
'''
Central hyperplane sections of the polydisc :math:`\\mathbb{D}^n`.

.. versionadded:: 0.1.0
    Quadrature, Monte Carlo and closed-form section volume engines, the
    special function ``Psi``, explicit bounds, region partition and
    verification sweeps.
'''
from .special import *
from .volume import *
from .bounds import *
from .harness import *
from .config import *

from ._version import get_versions

__version__ = get_versions()['version']
del get_versions
