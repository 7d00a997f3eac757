"""Core numerical modules of faberlab."""
