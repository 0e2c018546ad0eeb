"""Forward-curve families G(τ, x)."""
