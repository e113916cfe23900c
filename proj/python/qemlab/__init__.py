"""Quantum error mitigation lab: simulators, mitigators, datasets, experiments."""

try:
    from qemlab._core import *  # noqa: F401,F403  (installed wheel layout)
    from qemlab._core import __version__  # noqa: F401
except ImportError:
    # In-tree builds put the extension next to this package on sys.path.
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
