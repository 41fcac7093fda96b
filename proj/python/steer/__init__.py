from ._steer import *  # noqa: F401,F403
from ._steer import __version__  # noqa: F401
