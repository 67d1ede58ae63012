"""Cube roots of Dedekind eta-quotients and Atkin-Swinnerton-Dyer congruences mod p^2."""

from .asd import CoefficientTable, PrimeReport, asd_check, case1_scan, case2_scan, prime_report
from .eta import EtaQuotient, TupleSpec, expand, parse_quotient, parse_tuple
from .ligozat import check_ligozat, kronecker
from .qseries import FracSeries

__all__ = [
    "CoefficientTable", "EtaQuotient", "FracSeries", "PrimeReport", "TupleSpec",
    "asd_check", "case1_scan", "case2_scan", "check_ligozat", "expand", "kronecker",
    "parse_quotient", "parse_tuple", "prime_report",
]
