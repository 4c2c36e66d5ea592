"""wdckit: polyhedral DC functions, auras and the WDC sets they define."""

__version__ = "0.1.0"
