"""Offline period-finding lab: exact simulation of database-reuse attacks
on toy symmetric constructions, plus the matching analytic cost model."""
