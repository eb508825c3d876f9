"""snowforge: snowball construction and quasiconformal uniformization toolkit."""

__version__ = "0.1.0"
