try:
    from ._hklab import *  # noqa: F401,F403  (installed layout)
    from ._hklab import __version__  # noqa: F401
except ImportError:  # in-tree layout: extension sits on sys.path
    from _hklab import *  # noqa: F401,F403
    from _hklab import __version__  # noqa: F401
