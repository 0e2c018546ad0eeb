"""Monte Carlo simulation of the state model and arbitrage checks."""
