class StepTooLarge(RuntimeError):
    """The fixed RK4 step does not resolve the dynamics; shrink ``dt``."""


class ModeMismatch(ValueError):
    """Mode function support is not covered by the two-time grid."""


class PhaseLeak(RuntimeError):
    """Phase-rotated mode amplitudes are not real (detuning or a bug)."""


class SingularAmplitude(RuntimeError):
    """Semiclassical field amplitude reached r**2 <= 0."""
