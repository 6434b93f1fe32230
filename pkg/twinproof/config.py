from dataclasses import dataclass


__all__ = ("Limits", "Defaults", "limits", "defaults")


@dataclass(frozen=True)
class Limits:
    """Aggregate class of the size caps and numerical tolerances."""

    dimension_cap: int = 2 ** 20
    operator_node_cap: int = 12
    coloring_family_node_cap: int = 8
    oracle_node_cap: int = 30
    exhaustive_scan_node_cap: int = 8
    state_tolerance: float = 1e-9
    hermitian_tolerance: float = 1e-12
    povm_tolerance: float = 1e-9
    imaginary_residue: float = 1e-10
    numerical_zero: float = 1e-15
    float_mantissa_bits: int = 53


@dataclass(frozen=True)
class Defaults:
    """Aggregate class of the default run parameters."""

    eigen_tolerance: float = 1e-12
    eigen_max_iterations: int = 2000
    eigen_restarts: int = 5
    seesaw_restarts: int = 200
    seesaw_gain: float = 1e-10
    seesaw_max_sweeps: int = 500
    mixed_check_mixtures: int = 20
    mixed_check_components: int = 4
    monte_carlo_trials: int = 10_000
    lemma_trials: int = 1000
    guard_bits: int = 8
    seed: int = 2010


limits = Limits()
defaults = Defaults()
