from . import benchmark, bounds, training

__all__ = ["benchmark", "bounds", "training"]
