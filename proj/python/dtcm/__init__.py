from _dtcm import *  # noqa: F401,F403
from _dtcm import __version__  # noqa: F401
