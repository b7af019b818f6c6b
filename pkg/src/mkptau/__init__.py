"""Exact tau-functions of the multicomponent / matrix modified KP hierarchy."""
