"""eitcool - tripod-EIT cooling theory for trapped-ion chains"""

__version__ = "0.1.0"
__author__ = "Oleksiy"
__description__ = "Steady states, cooling limits, chain modes and thermometry for tripod EIT cooling"
