"""Lorenz T-point trefoil, fake-horseshoe model and modular geodesic flow."""
