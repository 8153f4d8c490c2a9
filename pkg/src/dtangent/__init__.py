"""Higher tangent spaces, obstructions and cosection checks for affine schemes at a point."""

__version__ = "0.1.0"
