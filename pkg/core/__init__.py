"""State-model primitives: domain boxes, coefficient functions, jump measures and the jump-diffusion model."""
