"""Exception types raised across the placement pipeline."""


class PlacementError(Exception):
    pass


class ValidationError(PlacementError):
    pass


class ParseError(PlacementError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class InsufficientSpectrum(PlacementError):
    def __init__(self, band, needed_colors: int, available_levels: int):
        super().__init__(
            f"band [{band.lo:.4g}, {band.hi:.4g}] Hz offers {available_levels} isolated "
            f"levels but the conflict graph needs {needed_colors}"
        )
        self.band = band
        self.needed_colors = needed_colors
        self.available_levels = available_levels


class DegenerateResonator(PlacementError):
    pass


class MissingResonator(PlacementError):
    def __init__(self, edge):
        super().__init__(f"no resonator for edge {edge}")
        self.edge = edge


class GridTooCoarse(PlacementError):
    pass


class Diverged(PlacementError):
    pass


class NoFeasibleSite(PlacementError):
    pass


class IntegrationFailed(PlacementError):
    def __init__(self, resonator_ids, placement=None):
        super().__init__(f"resonators not integrated: {sorted(resonator_ids)}")
        self.resonator_ids = sorted(resonator_ids)
        self.placement = placement


class NotIntegrated(PlacementError):
    pass


class MappingInvalid(PlacementError):
    pass
