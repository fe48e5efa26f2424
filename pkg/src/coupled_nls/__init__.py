"""Ground states of a two-component nonlinear Schrodinger system on radial grids."""
