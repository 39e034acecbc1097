"""Exception types raised across gpwave."""


class GPWaveError(Exception):
    """Base class for all gpwave errors."""


class GridError(GPWaveError, ValueError):
    """Invalid grid parameters or grid mismatch between fields."""


class NonFiniteSymbol(GPWaveError, ValueError):
    def __init__(self, frequency):
        self.frequency = tuple(float(f) for f in frequency)
        super().__init__(f"multiplier symbol is not finite at frequency xi={self.frequency}")


class VortexEncountered(GPWaveError):
    def __init__(self, value, node):
        self.value = float(value)
        self.node = tuple(int(i) for i in node)
        super().__init__(f"|psi| = {self.value:.3e} below vortex threshold at node {self.node}")


class NotPotential(GPWaveError, ValueError):
    pass


class NotAdmissible(GPWaveError, ValueError):
    pass


class NonFinite(GPWaveError, FloatingPointError):
    def __init__(self, step, trajectory=None):
        self.step = int(step)
        self.trajectory = trajectory
        super().__init__(f"non-finite values after step {self.step}")


class NoTravellingWave(GPWaveError, ValueError):
    pass


class QuadratureTooCoarse(GPWaveError, ValueError):
    pass


class GridTooCoarse(GPWaveError, ValueError):
    pass


class DegenerateBound(GPWaveError, ZeroDivisionError):
    pass


class NotAdmissiblePair(GPWaveError, ValueError):
    pass


class FitDomainError(GPWaveError, ValueError):
    pass


class HorizonViolation(GPWaveError, ValueError):
    def __init__(self, eps, t, horizon):
        self.eps, self.t, self.horizon = float(eps), float(t), float(horizon)
        super().__init__(f"t={self.t} exceeds the admissible horizon {self.horizon:.4g} at eps={self.eps}")


class WraparoundViolation(GPWaveError, ValueError):
    pass


class ConfigError(GPWaveError, ValueError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
