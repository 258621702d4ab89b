from ._fkklab import *  # noqa: F401,F403
from ._fkklab import __doc__  # noqa: F401
