"""
Exceptions raised by sumo.
"""


class DomainError(ValueError):
    """
    A parameter lies outside the domain where a formula is defined
    (lambda <= 0, lambda <= 1 for 1/r-type elements, scale <= 0, ...).
    """


class PairingError(ValueError):
    """
    Two radial bases are not related by the lambda pairing an operator needs.
    """


class ConfigError(ValueError):
    """
    Malformed configuration file or command-line options.
    """


class MissingCoefficient(KeyError):
    """
    A coupling table lacks an entry needed by a matrix element.

    Attributes
    ----------
    key : tuple
        The absent (v1, alpha1, L1, v2, alpha2, L2, v3, alpha3, L3) label.
    """

    def __init__(self, key, source=None):
        self.key = tuple(key)
        self.source = source
        where = '' if source is None else ' in {}'.format(source)
        KeyError.__init__(self, "missing coefficient ({} {} {}; {} {} {}; {} {} {}){}".format(*self.key, where))

    def __str__(self):
        return self.args[0]


class ConvergenceError(RuntimeError):
    """
    An iterative or extrapolated computation did not reach its tolerance.

    Attributes
    ----------
    trace : list
        Partial results gathered before giving up.
    """

    def __init__(self, msg, trace=None):
        RuntimeError.__init__(self, msg)
        self.trace = [] if trace is None else list(trace)
