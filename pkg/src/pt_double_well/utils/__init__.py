"""Small helpers shared by the numerical modules and the CLI."""
