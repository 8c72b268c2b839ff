"""
Verification Checks
===================

Each module contributes one or more ``BaseCheck`` subclasses; the
``CheckManager`` discovers them and serves them by name (the ``--which``
values of the command-line driver).
"""

from .base_check import BaseCheck, CheckContext, CheckInfo, CheckReport
from .check_manager import CheckManager, get_check_manager

__all__ = ['BaseCheck', 'CheckContext', 'CheckInfo', 'CheckReport', 'CheckManager', 'get_check_manager']
