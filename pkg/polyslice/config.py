# coding: utf-8
"""
Run-time configuration: environment, YAML sweep files and CLI defaults.

.. versionadded:: 0.1.0
"""
import logging
import os

import path_helpers as ph
import ruamel.yaml

__all__ = ['THREADS_VARIABLE', 'threads', 'read_yaml', 'load_sweep_config',
           'default_quadrature_config', 'default_psi_config']

logger = logging.getLogger(__name__)

#: Environment variable capping the number of worker threads.
THREADS_VARIABLE = 'POLYSLICE_THREADS'


def threads() -> int:
    """
    Returns
    -------
    int
        Worker count from :data:`THREADS_VARIABLE` (default 1).

    Raises
    ------
    ValueError
        If the variable is set to anything but a positive integer.
    """
    value = os.environ.get(THREADS_VARIABLE, '').strip()
    if not value:
        return 1
    try:
        count = int(value)
    except ValueError:
        count = 0
    if count < 1:
        raise ValueError(f'`{THREADS_VARIABLE}` must be a positive integer '
                         f'(got `{value}`).')
    return count


def read_yaml(path) -> dict:
    """
    Parameters
    ----------
    path : str
        Path to YAML document.

    Returns
    -------
    dict
        Decoded top-level mapping (empty for an empty document).
    """
    yaml = ruamel.yaml.YAML(typ='safe')
    document = yaml.load(ph.path(path).text())
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ValueError(f'Expected a mapping at top level of `{path}`.')
    return document


def load_sweep_config(path):
    """
    Load a sweep configuration file.

    Example document::

        n_values: [3, 4, 8]
        directions_per_n: 20
        sampler: dirichlet_squares
        seed: 7
        mc_samples: 20000
        quadrature:
          abs_tol: 1.0e-8
          max_panels: 4096

    Parameters
    ----------
    path : str
        Path to YAML document.

    Returns
    -------
    polyslice.harness.SweepConfig

    Raises
    ------
    ValueError
        If the document contains unknown keys or invalid values.
    """
    from .harness import SweepConfig

    logger.debug('Reading sweep configuration from `%s`.', path)
    return SweepConfig.from_mapping(read_yaml(path))


def default_quadrature_config():
    """
    Returns
    -------
    polyslice.volume.QuadratureConfig
        Section volume defaults (``abs_tol=1e-8``).
    """
    from .volume import DEFAULT_VOLUME_CONFIG

    return DEFAULT_VOLUME_CONFIG


def default_psi_config():
    """
    Returns
    -------
    polyslice.volume.QuadratureConfig
        Defaults for :func:`polyslice.volume.psi` (``abs_tol=1e-7``).
    """
    from .volume import DEFAULT_PSI_CONFIG

    return DEFAULT_PSI_CONFIG
