"""Exception types shared across the engine."""


class EmobilityError(Exception):
    """Base class for all engine errors."""


class NetworkFormatError(EmobilityError):
    """Network document violates the network JSON schema."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DanglingNodeError(NetworkFormatError):
    """An edge references a node id that is not declared."""

    def __init__(self, node_id, edge_id=None):
        msg = f"edge references unknown node {node_id!r}"
        if edge_id is not None:
            msg += f" (edge {edge_id!r})"
        super().__init__(msg, field="edges")
        self.node_id = node_id


class UnknownNodeError(EmobilityError):
    """A query named a node id that is not in the graph."""

    def __init__(self, node_id):
        super().__init__(f"unknown node {node_id!r}")
        self.node_id = node_id


class ScenarioFormatError(EmobilityError):
    """Scenario document violates the scenario JSON schema."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class SocOutOfRangeError(ScenarioFormatError):
    """State of charge outside [0, 100]."""

    def __init__(self, soc, field=None):
        super().__init__(f"soc out of range [0, 100]: {soc}", field=field)
        self.soc = soc


class ClockOutOfRangeError(EmobilityError):
    """Time-of-day outside [0, 86400)."""

    def __init__(self, clock_s):
        super().__init__(f"clock out of range [0, 86400): {clock_s}")
        self.clock_s = clock_s


class NoFeasibleEntryError(EmobilityError):
    """Origin cannot walk to any hub, or no hub can walk to the destination."""


class NoFeasiblePlanError(EmobilityError):
    """No feasible route exists between origin and destination."""


class DeadEndError(EmobilityError):
    """Every candidate transition has a zero selection weight."""


class InsufficientPairsError(EmobilityError):
    """The graph does not contain enough reachable origin/destination pairs."""
