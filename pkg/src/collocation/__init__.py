"""Collocation maps and the G-inner products they induce."""
