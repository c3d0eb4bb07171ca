"""Total-degree monomial basis and the stacked evaluation space."""
