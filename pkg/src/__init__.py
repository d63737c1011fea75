"""Package initialization for the hyperbolic Schrödinger laboratory"""
