"""Backwards-compatible setup.py for pip install -e ."""
from setuptools import setup

setup()
