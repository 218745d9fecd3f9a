"""ranktwo: rank analysis of k-automatic sequences.

A sequence x has rank at most r when it factors as an infinite product of
words drawn from a set of size r.  This package decides, for a sequence
given as a base-k automaton with output, whether its rank is one, two, or
at least three, and exposes the first-order engine, the computable
constants, and the brute-force oracles the decision rests on.
"""

__version__ = "0.1.0"
