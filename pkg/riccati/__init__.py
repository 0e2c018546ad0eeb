"""Separable and affine term structures: Riccati equations, solver and bond prices."""
