"""Monte Carlo harness: sweeps, experiments, oracles and the CLI."""
