"""Desk-scale verification of the analytic strong-BSD quantities for the
28 absolutely simple genus-2 Atkin-Lehner quotient Jacobians.

Submodules: numbers (quadratic orders, Kronecker symbol, finite fields),
curve (integral models, point counts, Euler factors, Tamagawa numbers),
jacobian (Mumford arithmetic, torsion, point search), kummer (canonical
heights and regulators), lfunction (coefficients and central
derivatives by the approximate functional equation), periods (real
volume), galrep (residual-representation reducibility and image
certificates), heegner (discriminant search and index divisibility),
bsd (analytic Sha assembly, twist route, certification checklist),
data (fixtures), cli (command-line front end).
"""

__version__ = "0.1.0"
