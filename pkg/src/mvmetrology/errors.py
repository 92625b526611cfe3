"""Domain errors raised by the metrology engine."""


class MetrologyError(Exception):
    """Base class for domain errors (as opposed to invalid-input ValueErrors)."""


class PostselectionImpossible(MetrologyError):
    """The postselection success probability is numerically zero; the
    conditional pointer state and everything downstream are undefined."""


class OrthogonalPostselection(MetrologyError):
    """The postselected sensor state is orthogonal to the evolved sensor
    state, so the modular value diverges."""


class LimitPoint(MetrologyError):
    """A closed form was evaluated where its denominator vanishes; approach
    the point along theta (or omega) instead."""
