"""Version information for jscc-sim"""

__version__ = "1.0.0"
