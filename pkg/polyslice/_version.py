# coding: utf-8
"""
Version of the installed ``polyslice`` distribution.

Source checkouts that are not installed report :data:`FALLBACK_VERSION`.
"""
from importlib import metadata

#: Version of the source tree, read by ``setup.py``.
FALLBACK_VERSION = '0.1.0'


def get_versions() -> dict:
    '''
    Returns
    -------
    dict
        ``version`` and ``error`` (``None`` unless the distribution is not
        installed).
    '''
    try:
        return {'version': metadata.version('polyslice'), 'error': None}
    except metadata.PackageNotFoundError:
        return {'version': FALLBACK_VERSION,
                'error': 'polyslice distribution not installed'}
