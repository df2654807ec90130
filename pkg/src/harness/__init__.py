"""Monte-Carlo experiment runner, CSV output and plots."""
