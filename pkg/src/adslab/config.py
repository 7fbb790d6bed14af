from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical knobs used across the lab.

    ``algebraic`` bounds identities that hold exactly in exact arithmetic,
    ``finite_difference`` bounds comparisons against difference quotients and
    ``curvature`` bounds grid-based curvature checks.  ``rank_rel`` is the
    relative singular-value cutoff and ``ambiguity_factor`` the band around it
    inside which a rank decision is refused.
    """

    algebraic: float = 1e-10
    finite_difference: float = 1e-8
    curvature: float = 1e-6
    rank_rel: float = 1e-8
    ambiguity_factor: float = 10.0
    plane: float = 1e-9

    def with_overrides(self, **kwargs):
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)

    def as_dict(self):
        return {
            "algebraic": self.algebraic,
            "finite_difference": self.finite_difference,
            "curvature": self.curvature,
            "rank_rel": self.rank_rel,
            "ambiguity_factor": self.ambiguity_factor,
            "plane": self.plane,
        }


DEFAULT_TOL = Tolerances()
