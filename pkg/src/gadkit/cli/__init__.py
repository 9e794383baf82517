"""
Command-line interface for gadkit.
"""

from .main import main, exit_code_for

__all__ = ['main', 'exit_code_for']
