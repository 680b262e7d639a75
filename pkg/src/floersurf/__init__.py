"""floersurf: combinatorial Fukaya-categorical invariants of curves on surfaces.

Exact Novikov-field arithmetic, combinatorial surfaces with rational area
weights, immersed curves with local systems, Floer complexes and A-infinity
products from polygon counts in universal-cover patches, gentle-algebra
string/band classification, cyclic covers, and the Schmutz graph.
"""

__version__ = "0.1.0"
