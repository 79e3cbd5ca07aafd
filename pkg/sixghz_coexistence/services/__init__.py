# Long-running workflows: Monte Carlo coverage, empirical rates, game studies
