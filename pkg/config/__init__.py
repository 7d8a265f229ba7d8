"""
Configuration Package
Settings and constants for the weight one modular forms engine
"""
