# Engines: binning, losses, sketches, bounds, trees, boosting, metrics
