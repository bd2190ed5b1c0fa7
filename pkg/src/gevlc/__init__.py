"""Pseudospectral laboratory for Gevrey regularity of a simplified nematic
liquid-crystal flow on the periodic box."""

__version__ = "0.1.0"
