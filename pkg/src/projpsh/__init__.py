"""Bounded plurisubharmonic exhaustions on Lipschitz domains in CP^n."""

__version__ = "0.1.0"
