__author__ = "rocscale developers"

__license__ = "BSD 3 Clause"
__version__ = "0.3.0"
